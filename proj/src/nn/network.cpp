#include "taguchi/nn/network.hpp"

#include "taguchi/nn/activation.hpp"
#include "taguchi/nn/kernels.hpp"
#include "taguchi/util/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taguchi::nn {


ParamLayout param_layout(const ModelSpec& spec) {
  const auto shapes = infer_shapes(spec);
  ParamLayout layout;
  FeatureShape in = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    Index weights = 0, biases = 0;
    if (const auto* conv = std::get_if<Conv2D>(&spec.layers[i])) {
      weights = conv->filters * conv->kernel_h * conv->kernel_w * in.channels;
      biases = conv->filters;
    } else if (const auto* dense = std::get_if<Dense>(&spec.layers[i])) {
      weights = dense->units * in.size();
      biases = dense->units;
    }
    layout.offset.push_back(layout.total);
    layout.weight_count.push_back(weights);
    layout.bias_count.push_back(biases);
    layout.total += weights + biases;
    in = shapes[i];
  }
  return layout;
}

Eigen::VectorXd init_params(const ModelSpec& spec, std::uint64_t seed) {
  const ParamLayout layout = param_layout(spec);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(layout.total);
  util::Rng rng(seed);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Index weights = layout.weight_count[i];
    if (weights == 0) continue;
    const Index fan_in = weights / layout.bias_count[i];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Index k = 0; k < weights; ++k) params(layout.offset[i] + k) = util::uniform(rng, -bound, bound);
  }
  return params;
}

namespace {

// Samples per im2col chunk, keeping the patch matrix near 2 MB.
Index chunk_samples(Index patch_rows, Index pixels, Index batch) {
  constexpr Index kTarget = Index{1} << 18;
  return std::clamp<Index>(kTarget / std::max<Index>(1, patch_rows * pixels), 1, batch);
}

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
void apply_activation(Activation activation, Matrix<Scalar>& values) {
  if (activation == Activation::Relu)
    values = relu(values.array()).matrix();
  else if (activation == Activation::Relu6)
    values = relu6(values.array()).matrix();
}

template <typename Scalar>
void mask_gradient(Activation activation, const Matrix<Scalar>& output, Matrix<Scalar>& grad) {
  if (activation == Activation::Relu)
    grad.array() *= relu_grad_mask(output.array());
  else if (activation == Activation::Relu6)
    grad.array() *= relu6_grad_mask(output.array());
}

}  // namespace

template <typename Scalar>
BasicForwardPass<Scalar> forward(const ModelSpec& spec, const Vector<Scalar>& params, const BasicTensor<Scalar>& batch,
                                 bool keep_cache) {
  using MatrixS = Matrix<Scalar>;
  using ConstMap = Eigen::Map<const MatrixS>;
  validate_classifier(spec);
  if (batch.shape() != spec.input)
    throw ShapeError("batch shape " + to_string(batch.shape()) + " does not match model input " + to_string(spec.input));
  const ParamLayout layout = param_layout(spec);
  if (params.size() != layout.total)
    throw std::invalid_argument("forward: expected " + std::to_string(layout.total) + " parameters, got " +
                                std::to_string(params.size()));

  const auto shapes = infer_shapes(spec);
  const Index n = batch.batch();
  BasicForwardPass<Scalar> pass;
  pass.activations.reserve(spec.layers.size() + 1);
  pass.activations.push_back(batch);
  pass.argmax.resize(spec.layers.size());

  MatrixS cols;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const BasicTensor<Scalar>& in = pass.activations.back();
    const FeatureShape& out_shape = shapes[i];
    MatrixS out;
    if (const auto* conv = std::get_if<Conv2D>(&spec.layers[i])) {
      const Index k = conv->kernel_h * conv->kernel_w * in.shape().channels;
      const ConstMap w(params.data() + layout.offset[i], conv->filters, k);
      const Eigen::Map<const Vector<Scalar>> b(params.data() + layout.offset[i] + layout.weight_count[i], conv->filters);
      const Index hw = in.shape().pixels();
      const Index step = chunk_samples(k, hw, n);
      out.resize(conv->filters, n * hw);
      for (Index s = 0; s < n; s += step) {
        const Index m = std::min(step, n - s);
        kernels::im2col<Scalar>(in.values().middleCols(s * hw, m * hw), m, in.shape().height, in.shape().width,
                                conv->kernel_h, conv->kernel_w, cols);
        out.middleCols(s * hw, m * hw).noalias() = w * cols;
      }
      out.colwise() += b;
      apply_activation(conv->activation, out);
    } else if (std::holds_alternative<MaxPool2D>(spec.layers[i])) {
      kernels::max_pool_forward(in.values(), n, in.shape().height, in.shape().width, out, pass.argmax[i]);
    } else if (std::holds_alternative<Flatten>(spec.layers[i])) {
      out = ConstMap(in.values().data(), out_shape.channels, n);
    } else {
      const auto& dense = std::get<Dense>(spec.layers[i]);
      const ConstMap w(params.data() + layout.offset[i], dense.units, in.shape().size());
      const Eigen::Map<const Vector<Scalar>> b(params.data() + layout.offset[i] + layout.weight_count[i], dense.units);
      out.noalias() = w * in.values();
      out.colwise() += b;
    }
    pass.activations.emplace_back(n, out_shape, std::move(out));
    if (!keep_cache && pass.activations.size() > 2) pass.activations.erase(pass.activations.begin() + 1);
  }
  pass.scores = pass.activations.back().values().row(0);
  if (!keep_cache) {
    pass.activations.clear();
    pass.argmax.clear();
  }
  return pass;
}

template <typename Scalar>
Vector<Scalar> backward(const ModelSpec& spec, const Vector<Scalar>& params, const BasicForwardPass<Scalar>& pass,
                        const RowVector<Scalar>& score_grad) {
  using MatrixS = Matrix<Scalar>;
  using ConstMap = Eigen::Map<const MatrixS>;
  using GradMap = Eigen::Map<MatrixS>;
  if (pass.activations.size() != spec.layers.size() + 1)
    throw std::invalid_argument("backward: forward pass was run without a cache");
  const ParamLayout layout = param_layout(spec);
  const Index n = pass.activations.front().batch();
  if (score_grad.size() != n) throw std::invalid_argument("backward: score gradient size differs from batch");

  Vector<Scalar> grads = Vector<Scalar>::Zero(layout.total);
  MatrixS grad = score_grad;  // d loss / d output of the current layer
  MatrixS cols, next;
  for (std::size_t li = spec.layers.size(); li-- > 0;) {
    const BasicTensor<Scalar>& in = pass.activations[li];
    const BasicTensor<Scalar>& out = pass.activations[li + 1];
    const bool need_input_grad = li > 0;
    if (const auto* conv = std::get_if<Conv2D>(&spec.layers[li])) {
      mask_gradient(conv->activation, out.values(), grad);
      const Index k = conv->kernel_h * conv->kernel_w * in.shape().channels;
      GradMap dw(grads.data() + layout.offset[li], conv->filters, k);
      const ConstMap w(params.data() + layout.offset[li], conv->filters, k);
      const Index hw = in.shape().pixels();
      const Index step = chunk_samples(k, hw, n);
      if (need_input_grad) next.resize(in.shape().channels, n * hw);
      for (Index s = 0; s < n; s += step) {
        const Index m = std::min(step, n - s);
        const auto g = grad.middleCols(s * hw, m * hw);
        kernels::im2col<Scalar>(in.values().middleCols(s * hw, m * hw), m, in.shape().height, in.shape().width,
                                conv->kernel_h, conv->kernel_w, cols);
        dw.noalias() += g * cols.transpose();
        if (need_input_grad) {
          cols.noalias() = w.transpose() * g;
          kernels::col2im<Scalar>(cols, m, in.shape().height, in.shape().width, conv->kernel_h, conv->kernel_w,
                                  in.shape().channels, next.middleCols(s * hw, m * hw));
        }
      }
      grads.segment(layout.offset[li] + layout.weight_count[li], conv->filters) = grad.rowwise().sum();
    } else if (std::holds_alternative<MaxPool2D>(spec.layers[li])) {
      if (need_input_grad) kernels::max_pool_backward(grad, pass.argmax[li], in.values().cols(), next);
    } else if (std::holds_alternative<Flatten>(spec.layers[li])) {
      if (need_input_grad) next = ConstMap(grad.data(), in.shape().channels, n * in.shape().pixels());
    } else {
      const auto& dense = std::get<Dense>(spec.layers[li]);
      GradMap dw(grads.data() + layout.offset[li], dense.units, in.shape().size());
      dw.noalias() = grad * in.values().transpose();
      grads.segment(layout.offset[li] + layout.weight_count[li], dense.units) = grad.rowwise().sum();
      if (need_input_grad) {
        const ConstMap w(params.data() + layout.offset[li], dense.units, in.shape().size());
        next.noalias() = w.transpose() * grad;
      }
    }
    if (need_input_grad) grad.swap(next);
  }
  return grads;
}

template BasicForwardPass<float> forward(const ModelSpec&, const Vector<float>&, const BasicTensor<float>&, bool);
template BasicForwardPass<double> forward(const ModelSpec&, const Vector<double>&, const BasicTensor<double>&, bool);
template Vector<float> backward(const ModelSpec&, const Vector<float>&, const BasicForwardPass<float>&,
                                const RowVector<float>&);
template Vector<double> backward(const ModelSpec&, const Vector<double>&, const BasicForwardPass<double>&,
                                 const RowVector<double>&);

}  // namespace taguchi::nn
