#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace taguchi::nn {

using Index = Eigen::Index;

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-sample feature shape: (H, W, C) or flat (D), stored as H = W = 1, C = D.
struct FeatureShape {
  Index height = 1;
  Index width = 1;
  Index channels = 1;
  bool flat = false;

  static FeatureShape spatial(Index h, Index w, Index c) { return {h, w, c, false}; }
  static FeatureShape vector(Index d) { return {1, 1, d, true}; }

  Index pixels() const { return height * width; }
  Index size() const { return height * width * channels; }

  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

/// "(100, 100, 32)" or "(9216)".
inline std::string to_string(const FeatureShape& s) {
  if (s.flat) return "(" + std::to_string(s.channels) + ")";
  return "(" + std::to_string(s.height) + ", " + std::to_string(s.width) + ", " + std::to_string(s.channels) + ")";
}

/// Batch of N samples in NHWC order. Values are a (C x N*H*W) column-major matrix, so
/// column ((n*H + y)*W + x) holds the channel vector of one pixel and each sample's
/// H*W*C values are contiguous. A flat tensor is (D x N).
template <typename Scalar>
class BasicTensor {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicTensor() = default;
  BasicTensor(Index batch, FeatureShape shape)
      : batch_(batch), shape_(shape), values_(Matrix::Zero(shape.channels, batch * shape.pixels())) {}
  BasicTensor(Index batch, FeatureShape shape, Matrix values)
      : batch_(batch), shape_(shape), values_(std::move(values)) {
    if (values_.rows() != shape_.channels || values_.cols() != batch_ * shape_.pixels())
      throw ShapeError("tensor values are " + std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()) +
                       ", shape " + to_string(shape_) + " x " + std::to_string(batch_) + " needs " +
                       std::to_string(shape_.channels) + "x" + std::to_string(batch_ * shape_.pixels()));
  }

  Index batch() const { return batch_; }
  const FeatureShape& shape() const { return shape_; }
  Matrix& values() { return values_; }
  const Matrix& values() const { return values_; }

  Scalar& at(Index n, Index y, Index x, Index c) { return values_(c, (n * shape_.height + y) * shape_.width + x); }
  Scalar at(Index n, Index y, Index x, Index c) const {
    return values_(c, (n * shape_.height + y) * shape_.width + x);
  }

  /// Columns belonging to sample n.
  auto sample(Index n) { return values_.middleCols(n * shape_.pixels(), shape_.pixels()); }
  auto sample(Index n) const { return values_.middleCols(n * shape_.pixels(), shape_.pixels()); }

  bool all_finite() const { return values_.allFinite(); }

 private:
  Index batch_ = 0;
  FeatureShape shape_{};
  Matrix values_;
};

using Tensor = BasicTensor<double>;

}  // namespace taguchi::nn
