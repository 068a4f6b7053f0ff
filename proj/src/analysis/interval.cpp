#include "taguchi/analysis/interval.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace taguchi::analysis {

double student_t_quantile(double probability, double degrees_of_freedom) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(degrees_of_freedom), probability);
}

IntervalSummary interval_summary(const Eigen::Ref<const Eigen::VectorXd>& values, std::string name) {
  const Eigen::Index n = values.size();
  if (n < 2) throw AnalysisError("interval summary of '" + name + "' needs at least 2 values");
  IntervalSummary s;
  s.metric = std::move(name);
  s.count = n;
  s.mean = values.mean();
  s.stddev = std::sqrt((values.array() - s.mean).square().sum() / static_cast<double>(n - 1));
  s.half_width = student_t_quantile(0.975, static_cast<double>(n - 1)) * s.stddev / std::sqrt(static_cast<double>(n));
  return s;
}

IntervalSummary interval_summary(const ResponseTable& table, Metric metric) {
  return interval_summary(table.column(metric), std::string(metric_name(metric)));
}

}  // namespace taguchi::analysis
