#pragma once

#include "taguchi/analysis/responses.hpp"

#include <Eigen/Core>

#include <string>

namespace taguchi::analysis {

struct IntervalSummary {
  std::string metric;
  Eigen::Index count = 0;
  double mean = 0;
  double stddev = 0;      // sample standard deviation (n - 1)
  double half_width = 0;  // t(0.975, n - 1) * stddev / sqrt(n)

  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

/// Two-sided Student-t quantile.
double student_t_quantile(double probability, double degrees_of_freedom);

/// 95% confidence interval for the mean. Throws AnalysisError for fewer than 2 values.
IntervalSummary interval_summary(const Eigen::Ref<const Eigen::VectorXd>& values, std::string name);
IntervalSummary interval_summary(const ResponseTable& table, Metric metric);

}  // namespace taguchi::analysis
