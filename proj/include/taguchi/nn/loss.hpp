#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace taguchi::nn {

enum class LossKind { Hinge, SquaredHinge };

inline std::string to_string(LossKind kind) { return kind == LossKind::Hinge ? "hinge" : "squared_hinge"; }

template <typename Scalar>
struct LossResult {
  Scalar value;                                      // mean over the batch
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> gradient;  // d value / d score
};

/// hinge_i = max(0, 1 - t_i * y_i), squared hinge_i = hinge_i^2, averaged over the batch.
/// The subgradient at margin exactly 1 is 0. Throws std::invalid_argument for labels
/// outside {-1, +1} or mismatched sizes.
template <typename DerivedScores, typename DerivedLabels>
LossResult<typename DerivedScores::Scalar> margin_loss(const Eigen::MatrixBase<DerivedScores>& scores,
                                                      const Eigen::MatrixBase<DerivedLabels>& labels, LossKind kind) {
  using Scalar = typename DerivedScores::Scalar;
  const Eigen::Index n = scores.size();
  if (labels.size() != n) throw std::invalid_argument("margin_loss: score and label counts differ");
  if (n == 0) throw std::invalid_argument("margin_loss: empty batch");
  const auto t = labels.derived().array().reshaped().transpose().template cast<Scalar>().eval();
  if (((t != Scalar(1)) && (t != Scalar(-1))).any()) throw std::invalid_argument("margin_loss: labels must be -1 or +1");

  const auto y = scores.derived().array().reshaped().transpose().eval();
  const auto hinge = (Scalar(1) - t * y).cwiseMax(Scalar(0)).eval();
  const auto active = (hinge > Scalar(0)).template cast<Scalar>().eval();
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);

  LossResult<Scalar> result;
  if (kind == LossKind::Hinge) {
    result.value = hinge.sum() * inv_n;
    result.gradient = (-t * active * inv_n).matrix();
  } else {
    result.value = hinge.square().sum() * inv_n;
    result.gradient = (Scalar(-2) * t * hinge * inv_n).matrix();
  }
  return result;
}

}  // namespace taguchi::nn
