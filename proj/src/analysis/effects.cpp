#include "taguchi/analysis/effects.hpp"

#include "taguchi/analysis/sn_ratio.hpp"

#include <algorithm>
#include <numeric>

namespace taguchi::analysis {

namespace {

std::vector<FactorEffect> level_means(const doe::ExperimentPlan& plan, const Eigen::VectorXd& values) {
  std::vector<FactorEffect> effects;
  for (std::size_t f = 0; f < plan.factors.size(); ++f) {
    const auto& factor = plan.factors[f];
    FactorEffect effect;
    effect.factor = factor.name;
    std::vector<double> sums(factor.levels.size(), 0.0);
    std::vector<int> counts(factor.levels.size(), 0);
    for (std::size_t t = 0; t < plan.trials.size(); ++t) {
      const auto level = static_cast<std::size_t>(plan.level_index(t, f));
      sums[level] += values(static_cast<Eigen::Index>(t));
      ++counts[level];
    }
    for (std::size_t l = 0; l < factor.levels.size(); ++l) {
      if (counts[l] == 0)
        throw AnalysisError("factor '" + factor.name + "' level '" + factor.levels[l] + "' has no trials");
      effect.levels.push_back({factor.levels[l], sums[l] / counts[l], counts[l]});
    }
    const auto [lo, hi] = std::minmax_element(effect.levels.begin(), effect.levels.end(),
                                              [](const LevelMean& a, const LevelMean& b) { return a.mean < b.mean; });
    effect.delta = hi->mean - lo->mean;
    effects.push_back(std::move(effect));
  }

  std::vector<std::size_t> order(effects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return effects[a].delta > effects[b].delta; });
  for (std::size_t r = 0; r < order.size(); ++r) effects[order[r]].rank = static_cast<int>(r) + 1;
  return effects;
}

}  // namespace

MainEffectsTable main_effects(const ResponseTable& table, Metric metric) {
  const Eigen::VectorXd values = table.column(metric);
  return {metric, values.mean(), level_means(table.plan(), values)};
}

std::vector<std::string> rank_factors(const MainEffectsTable& effects) {
  std::vector<const FactorEffect*> sorted;
  for (const auto& e : effects.per_factor) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FactorEffect* a, const FactorEffect* b) { return a->rank < b->rank; });
  std::vector<std::string> names;
  for (const auto* e : sorted) names.push_back(e->factor);
  return names;
}

SnTable sn_effects(const ResponseTable& table, Metric metric, Objective objective) {
  const Eigen::VectorXd values = table.column(metric);
  Eigen::VectorXd sn(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) sn(i) = sn_ratio(values.segment(i, 1), objective);
  return {metric, objective, level_means(table.plan(), sn)};
}

PredictedOptimum predict_best(const MainEffectsTable& effects, Objective objective) {
  PredictedOptimum optimum;
  optimum.metric = effects.metric;
  optimum.objective = objective;
  optimum.grand_mean = effects.grand_mean;
  optimum.predicted = effects.grand_mean;
  for (const auto& factor : effects.per_factor) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < factor.levels.size(); ++l) {
      const bool better = objective == Objective::LargerIsBetter ? factor.levels[l].mean > factor.levels[best].mean
                                                                 : factor.levels[l].mean < factor.levels[best].mean;
      if (better) best = l;
    }
    optimum.levels.emplace_back(factor.factor, factor.levels[best].label);
    optimum.predicted += factor.levels[best].mean - effects.grand_mean;
  }
  return optimum;
}

PredictedOptimum predict_best(const ResponseTable& table, Metric metric, Objective objective) {
  return predict_best(main_effects(table, metric), objective);
}

}  // namespace taguchi::analysis
