#pragma once

#include <Eigen/Core>

namespace taguchi::nn {

template <typename Derived>
auto relu(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.cwiseMax(Scalar(0));
}

/// min(max(0, x), 6)
template <typename Derived>
auto relu6(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.cwiseMax(Scalar(0)).cwiseMin(Scalar(6));
}

// Derivative masks expressed on the activation output; the derivative is 0 at the
// kinks, so relu6 passes gradient only on the open interval (0, 6).
template <typename Derived>
auto relu_grad_mask(const Eigen::ArrayBase<Derived>& out) {
  using Scalar = typename Derived::Scalar;
  return (out > Scalar(0)).template cast<Scalar>();
}

template <typename Derived>
auto relu6_grad_mask(const Eigen::ArrayBase<Derived>& out) {
  using Scalar = typename Derived::Scalar;
  return ((out > Scalar(0)) && (out < Scalar(6))).template cast<Scalar>();
}

}  // namespace taguchi::nn
