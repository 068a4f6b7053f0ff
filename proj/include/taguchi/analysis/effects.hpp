#pragma once

#include "taguchi/analysis/responses.hpp"

#include <string>
#include <utility>
#include <vector>

namespace taguchi::analysis {

struct LevelMean {
  std::string label;
  double mean = 0;
  int count = 0;
};

struct FactorEffect {
  std::string factor;
  std::vector<LevelMean> levels;
  double delta = 0;  // max level mean - min level mean
  int rank = 0;      // 1 = largest delta
};

struct MainEffectsTable {
  Metric metric{};
  double grand_mean = 0;
  std::vector<FactorEffect> per_factor;  // plan declaration order
};

/// Mean response per factor level, with delta and rank. Ties in delta rank by
/// declaration order.
MainEffectsTable main_effects(const ResponseTable& table, Metric metric);

/// Factor names, rank 1 first.
std::vector<std::string> rank_factors(const MainEffectsTable& effects);

struct SnTable {
  Metric metric{};
  Objective objective{};
  /// per-factor, per-level mean of the single-run S/N ratios (dB)
  std::vector<FactorEffect> per_factor;
};

/// Main effects of per-run S/N ratios. Requires strictly positive responses.
SnTable sn_effects(const ResponseTable& table, Metric metric, Objective objective);

struct PredictedOptimum {
  Metric metric{};
  Objective objective{};
  std::vector<std::pair<std::string, std::string>> levels;  // factor -> chosen level
  double grand_mean = 0;
  /// grand_mean + sum over factors of (best level mean - grand_mean)
  double predicted = 0;
};

/// Best level per factor (argmax or argmin of level means, first level on ties)
/// and the additive-model prediction at that configuration.
PredictedOptimum predict_best(const ResponseTable& table, Metric metric, Objective objective);
PredictedOptimum predict_best(const MainEffectsTable& effects, Objective objective);

}  // namespace taguchi::analysis
