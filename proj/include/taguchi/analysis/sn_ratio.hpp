#pragma once

#include "taguchi/analysis/responses.hpp"

#include <Eigen/Core>

#include <cmath>

namespace taguchi::analysis {

/// Taguchi signal-to-noise ratio in decibels.
///   larger-is-better:  -10 log10(mean(1 / y^2))
///   smaller-is-better: -10 log10(mean(y^2))
/// Throws AnalysisError for an empty input or any y <= 0.
template <typename Derived>
typename Derived::Scalar sn_ratio(const Eigen::DenseBase<Derived>& values, Objective objective) {
  using Scalar = typename Derived::Scalar;
  const auto y = values.derived().array();
  if (y.size() == 0) throw AnalysisError("sn_ratio: no values");
  if ((y <= Scalar(0)).any()) throw AnalysisError("sn_ratio: values must be strictly positive");
  const Scalar msd = objective == Objective::LargerIsBetter ? y.square().inverse().mean() : y.square().mean();
  return Scalar(-10) * std::log10(msd);
}

}  // namespace taguchi::analysis
