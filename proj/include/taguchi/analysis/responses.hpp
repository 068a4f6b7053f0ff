#pragma once

#include "taguchi/doe/plan.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace taguchi::analysis {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Metric { TrainLoss, TrainAccuracy, ValLoss, ValAccuracy };

inline constexpr Metric kAllMetrics[] = {Metric::TrainLoss, Metric::TrainAccuracy, Metric::ValLoss,
                                         Metric::ValAccuracy};

/// Canonical names: train_loss, train_accuracy, val_loss, val_accuracy.
std::string_view metric_name(Metric metric);
/// Accepts the canonical names and the column names train_acc / val_acc. Throws AnalysisError.
Metric parse_metric(std::string_view name);

enum class Objective { LargerIsBetter, SmallerIsBetter };

std::string_view objective_name(Objective objective);
/// "max" / "larger" / "larger-is-better" and "min" / "smaller" / "smaller-is-better".
Objective parse_objective(std::string_view name);
/// Losses are smaller-is-better, accuracies larger-is-better.
Objective default_objective(Metric metric);

struct ResponseRecord {
  int run_index = 0;
  double train_loss = 0;
  double train_accuracy = 0;
  double val_loss = 0;
  double val_accuracy = 0;

  double value(Metric metric) const;
  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

/// Reads `run,train_loss,train_acc,val_loss,val_acc`. Throws doe::ParseError with the line number.
std::vector<ResponseRecord> read_responses(std::istream& in);
/// Writes the same format; values round-trip exactly.
void write_responses(std::ostream& out, const std::vector<ResponseRecord>& records);

/// A plan with exactly one response record per trial, ordered by run index.
class ResponseTable {
 public:
  /// Throws AnalysisError when records do not cover the plan's trials one-to-one.
  ResponseTable(doe::ExperimentPlan plan, std::vector<ResponseRecord> records);

  const doe::ExperimentPlan& plan() const { return plan_; }
  const std::vector<ResponseRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  /// Metric values in trial order.
  Eigen::VectorXd column(Metric metric) const;

 private:
  doe::ExperimentPlan plan_;
  std::vector<ResponseRecord> records_;
};

}  // namespace taguchi::analysis
