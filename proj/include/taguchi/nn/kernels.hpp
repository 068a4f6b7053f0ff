#pragma once

// Convolution and pooling kernels on NHWC tensors laid out as (C x N*H*W) matrices.

#include <Eigen/Core>

#include <algorithm>
#include <cstring>

namespace taguchi::nn::kernels {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// "same" padding split: the extra row/column of an even kernel goes after the image.
inline Index pad_before(Index kernel) { return (kernel - 1) / 2; }

/// Patch matrix for a stride-1 "same" convolution: (kh*kw*C x N*H*W). Row
/// (dy*kw + dx)*C + c of column j holds channel c at tap (dy, dx) of output pixel j.
template <typename Scalar>
using ConstRef = Eigen::Ref<const Matrix<Scalar>>;

template <typename Scalar>
void im2col(const ConstRef<Scalar>& input, Index batch, Index height, Index width, Index kernel_h, Index kernel_w,
            Matrix<Scalar>& cols) {
  const Index channels = input.rows();
  const Index pt = pad_before(kernel_h), pl = pad_before(kernel_w);
  cols.resize(kernel_h * kernel_w * channels, batch * height * width);
  const Scalar* src = input.data();
  for (Index n = 0; n < batch; ++n) {
    for (Index y = 0; y < height; ++y) {
      for (Index x = 0; x < width; ++x) {
        Scalar* dst = cols.col((n * height + y) * width + x).data();
        for (Index dy = 0; dy < kernel_h; ++dy) {
          const Index iy = y + dy - pt;
          for (Index dx = 0; dx < kernel_w; ++dx, dst += channels) {
            const Index ix = x + dx - pl;
            if (iy < 0 || iy >= height || ix < 0 || ix >= width)
              std::fill(dst, dst + channels, Scalar(0));
            else
              std::memcpy(dst, src + ((n * height + iy) * width + ix) * channels, sizeof(Scalar) * channels);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatters patch gradients back onto the (C x N*H*W) input grid.
/// input_grad must already be (C x N*H*W) and contiguous; it is overwritten.
template <typename Scalar>
void col2im(const ConstRef<Scalar>& cols, Index batch, Index height, Index width, Index kernel_h, Index kernel_w,
            Index channels, Eigen::Ref<Matrix<Scalar>> input_grad) {
  const Index pt = pad_before(kernel_h), pl = pad_before(kernel_w);
  eigen_assert(input_grad.rows() == channels && input_grad.cols() == batch * height * width);
  input_grad.setZero();
  Scalar* dst_base = input_grad.data();
  for (Index n = 0; n < batch; ++n) {
    for (Index y = 0; y < height; ++y) {
      for (Index x = 0; x < width; ++x) {
        const Scalar* src = cols.col((n * height + y) * width + x).data();
        for (Index dy = 0; dy < kernel_h; ++dy) {
          const Index iy = y + dy - pt;
          for (Index dx = 0; dx < kernel_w; ++dx, src += channels) {
            const Index ix = x + dx - pl;
            if (iy < 0 || iy >= height || ix < 0 || ix >= width) continue;
            Scalar* dst = dst_base + ((n * height + iy) * width + ix) * channels;
            for (Index c = 0; c < channels; ++c) dst[c] += src[c];
          }
        }
      }
    }
  }
}

/// 2x2 stride-2 max pooling with floor. argmax receives, per output element, the input
/// column holding the maximum (first in scan order on ties).
template <typename Scalar>
void max_pool_forward(const Matrix<Scalar>& input, Index batch, Index height, Index width, Matrix<Scalar>& output,
                      Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>& argmax) {
  const Index channels = input.rows();
  const Index oh = height / 2, ow = width / 2;
  output.resize(channels, batch * oh * ow);
  argmax.resize(channels, batch * oh * ow);
  for (Index n = 0; n < batch; ++n) {
    for (Index oy = 0; oy < oh; ++oy) {
      for (Index ox = 0; ox < ow; ++ox) {
        const Index j = (n * oh + oy) * ow + ox;
        const Index base = (n * height + 2 * oy) * width + 2 * ox;
        const Index candidates[4] = {base, base + 1, base + width, base + width + 1};
        for (Index c = 0; c < channels; ++c) {
          Index best = candidates[0];
          Scalar value = input(c, best);
          for (int k = 1; k < 4; ++k) {
            if (input(c, candidates[k]) > value) {
              best = candidates[k];
              value = input(c, best);
            }
          }
          output(c, j) = value;
          argmax(c, j) = best;
        }
      }
    }
  }
}

template <typename Scalar>
void max_pool_backward(const Matrix<Scalar>& output_grad, const Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>& argmax,
                       Index input_columns, Matrix<Scalar>& input_grad) {
  input_grad.setZero(output_grad.rows(), input_columns);
  for (Index j = 0; j < output_grad.cols(); ++j)
    for (Index c = 0; c < output_grad.rows(); ++c) input_grad(c, argmax(c, j)) += output_grad(c, j);
}

}  // namespace taguchi::nn::kernels
