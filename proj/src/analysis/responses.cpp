#include "taguchi/analysis/responses.hpp"

#include "taguchi/util/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

namespace taguchi::analysis {

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::TrainLoss: return "train_loss";
    case Metric::TrainAccuracy: return "train_accuracy";
    case Metric::ValLoss: return "val_loss";
    case Metric::ValAccuracy: return "val_accuracy";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "train_loss") return Metric::TrainLoss;
  if (name == "train_accuracy" || name == "train_acc") return Metric::TrainAccuracy;
  if (name == "val_loss") return Metric::ValLoss;
  if (name == "val_accuracy" || name == "val_acc") return Metric::ValAccuracy;
  throw AnalysisError("unknown metric '" + std::string(name) + "'");
}

std::string_view objective_name(Objective objective) {
  return objective == Objective::LargerIsBetter ? "larger-is-better" : "smaller-is-better";
}

Objective parse_objective(std::string_view name) {
  if (name == "max" || name == "larger" || name == "larger-is-better") return Objective::LargerIsBetter;
  if (name == "min" || name == "smaller" || name == "smaller-is-better") return Objective::SmallerIsBetter;
  throw AnalysisError("unknown objective '" + std::string(name) + "'");
}

Objective default_objective(Metric metric) {
  return metric == Metric::TrainLoss || metric == Metric::ValLoss ? Objective::SmallerIsBetter
                                                                  : Objective::LargerIsBetter;
}

double ResponseRecord::value(Metric metric) const {
  switch (metric) {
    case Metric::TrainLoss: return train_loss;
    case Metric::TrainAccuracy: return train_accuracy;
    case Metric::ValLoss: return val_loss;
    case Metric::ValAccuracy: return val_accuracy;
  }
  return 0;
}

std::vector<ResponseRecord> read_responses(std::istream& in) {
  std::vector<ResponseRecord> records;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split_csv(line);
    if (!have_header) {
      if (fields != std::vector<std::string>{"run", "train_loss", "train_acc", "val_loss", "val_acc"})
        throw doe::ParseError("response header must be run,train_loss,train_acc,val_loss,val_acc", line_no);
      have_header = true;
      continue;
    }
    if (fields.size() != 5)
      throw doe::ParseError("expected 5 fields, found " + std::to_string(fields.size()), line_no);
    long long run = 0;
    ResponseRecord rec;
    if (!util::parse_int(fields[0], run)) throw doe::ParseError("bad run number '" + fields[0] + "'", line_no);
    rec.run_index = static_cast<int>(run);
    double* targets[] = {&rec.train_loss, &rec.train_accuracy, &rec.val_loss, &rec.val_accuracy};
    for (int i = 0; i < 4; ++i)
      if (!util::parse_double(fields[static_cast<std::size_t>(i + 1)], *targets[i]))
        throw doe::ParseError("bad number '" + fields[static_cast<std::size_t>(i + 1)] + "'", line_no);
    if (rec.train_loss < 0 || rec.val_loss < 0) throw doe::ParseError("negative loss", line_no);
    if (rec.train_accuracy < 0 || rec.train_accuracy > 1 || rec.val_accuracy < 0 || rec.val_accuracy > 1)
      throw doe::ParseError("accuracy outside [0, 1]", line_no);
    records.push_back(rec);
  }
  if (!have_header) throw doe::ParseError("empty response table", line_no);
  return records;
}

void write_responses(std::ostream& out, const std::vector<ResponseRecord>& records) {
  out << "run,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& r : records)
    out << r.run_index << ',' << util::format_double(r.train_loss) << ',' << util::format_double(r.train_accuracy)
        << ',' << util::format_double(r.val_loss) << ',' << util::format_double(r.val_accuracy) << '\n';
}

ResponseTable::ResponseTable(doe::ExperimentPlan plan, std::vector<ResponseRecord> records)
    : plan_(std::move(plan)), records_(std::move(records)) {
  if (records_.size() != plan_.trials.size())
    throw AnalysisError("response table has " + std::to_string(records_.size()) + " rows but the plan has " +
                        std::to_string(plan_.trials.size()) + " trials");
  std::sort(records_.begin(), records_.end(),
            [](const ResponseRecord& a, const ResponseRecord& b) { return a.run_index < b.run_index; });
  for (std::size_t i = 0; i < records_.size(); ++i)
    if (records_[i].run_index != plan_.trials[i].run_index)
      throw AnalysisError("no one-to-one match between response runs and plan trials at run " +
                          std::to_string(plan_.trials[i].run_index));
}

Eigen::VectorXd ResponseTable::column(Metric metric) const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(records_.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) values(static_cast<Eigen::Index>(i)) = records_[i].value(metric);
  return values;
}

}  // namespace taguchi::analysis
