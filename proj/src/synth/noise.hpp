#pragma once

#include "taguchi/util/random.hpp"

#include <Eigen/Core>

#include <algorithm>

namespace taguchi::synth {

using Index = Eigen::Index;

/// Smoothstep-interpolated lattice noise on the unit square, values in [0, 1].
class ValueNoise {
 public:
  ValueNoise(util::Rng& rng, int cells);
  double operator()(double u, double v) const;

 private:
  int cells_;
  Eigen::MatrixXd lattice_;
};

}  // namespace taguchi::synth
