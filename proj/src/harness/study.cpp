#include "taguchi/harness/study.hpp"

#include "taguchi/util/text.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef TAGUCHI_FIXTURE_DIR
#define TAGUCHI_FIXTURE_DIR "fixtures"
#endif

namespace taguchi::harness {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StudyError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  auto partial = path;
  partial += ".part";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw StudyError("cannot write '" + partial.string() + "'");
    out << text;
    if (!out.flush()) throw StudyError("cannot write '" + partial.string() + "'");
  }
  fs::rename(partial, path);
}

std::string two_digits(int run) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%02d", run);
  return buffer;
}

fs::path checkpoint_name(int run_index) { return fs::path("checkpoints") / ("run_" + two_digits(run_index) + ".ckpt"); }

// The fields that decide trial outcomes; output_dir and parallel are excluded.
std::string study_identity(const StudyConfig& study) {
  StudyConfig copy = study;
  copy.output_dir = ".";
  copy.parallel = 1;
  return study_config_to_json(copy);
}

bool reusable(const fs::path& path, const doe::TrialConfig& trial, const StudyConfig& study, TrialResult& out) {
  if (!fs::exists(path)) return false;
  try {
    auto result = trial_result_from_json(read_file(path));
    if (!result.ok() || result.trial.run_index != trial.run_index || result.trial.settings != trial.settings) return false;
    if (!result.checkpoint.empty() && !fs::exists(study.output_dir / result.checkpoint)) return false;
    out = std::move(result);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

analysis::ResponseRecord to_record(const TrialResult& result) {
  return {result.trial.run_index, result.best.train_loss, result.best.train_accuracy, result.best.val_loss,
          result.best.val_accuracy};
}

}  // namespace

doe::ExperimentPlan make_plan(const StudyConfig& study) {
  validate(study);
  return doe::assign_factors(doe::build_standard_array(study.array), study.factors);
}

fs::path trial_result_path(const StudyConfig& study, int run_index) {
  return study.output_dir / "trials" / ("run_" + two_digits(run_index) + ".json");
}

StudyOutcome run_study(const StudyConfig& study, std::ostream* log) {
  auto plan = make_plan(study);
  fs::create_directories(study.output_dir);

  const auto identity_path = study.output_dir / "study.json";
  const auto identity = study_identity(study);
  if (fs::exists(identity_path) && read_file(identity_path) != identity)
    throw StudyError("'" + study.output_dir.string() + "' holds results of a different study configuration");
  write_file_atomic(identity_path, identity);

  std::ostringstream plan_text;
  doe::write_plan(plan_text, plan);
  write_file_atomic(study.output_dir / "plan.csv", plan_text.str());

  const std::size_t n = plan.trials.size();
  std::vector<TrialResult> results(n);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reusable(trial_result_path(study, plan.trials[i].run_index), plan.trials[i], study, results[i]))
      pending.push_back(i);
  }

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const auto& trial = plan.trials[pending[k]];
      TrialResult result;
      try {
        result = run_trial(trial, study, checkpoint_name(trial.run_index));
      } catch (const std::exception& e) {
        result.trial = trial;
        result.error = e.what();
      }
      try {
        write_file_atomic(trial_result_path(study, trial.run_index), trial_result_to_json(result));
      } catch (const std::exception& e) {
        if (result.ok()) result.error = e.what();
      }
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << "run " << trial.run_index << ": ";
        if (result.ok())
          *log << "val_accuracy " << util::format_fixed(result.best.val_accuracy, 4) << " val_loss "
               << util::format_fixed(result.best.val_loss, 4) << " (" << util::format_fixed(result.seconds, 1) << " s)\n";
        else
          *log << "failed: " << result.error << '\n';
      }
      results[pending[k]] = std::move(result);
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(study.parallel), pending.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::string failures;
  std::vector<analysis::ResponseRecord> records;
  for (const auto& r : results) {
    if (!r.ok()) failures += "\n  run " + std::to_string(r.trial.run_index) + ": " + r.error;
    records.push_back(to_record(r));
  }
  if (!failures.empty()) throw StudyError("trials failed:" + failures);

  std::ostringstream responses;
  analysis::write_responses(responses, records);
  write_file_atomic(study.output_dir / "responses.csv", responses.str());

  std::vector<int> executed;
  for (auto i : pending) executed.push_back(plan.trials[i].run_index);
  analysis::ResponseTable table(plan, std::move(records));
  return {std::move(plan), std::move(results), std::move(executed), std::move(table)};
}

analysis::ResponseTable load_study_responses(const StudyConfig& study) {
  auto plan = make_plan(study);
  std::ifstream in(study.output_dir / "responses.csv");
  if (!in) throw StudyError("no responses.csv in '" + study.output_dir.string() + "'");
  return analysis::ResponseTable(std::move(plan), analysis::read_responses(in));
}

Confirmation confirm(const StudyConfig& study, const analysis::PredictedOptimum& optimum) {
  doe::TrialConfig trial{0, optimum.levels};
  auto result = run_trial(trial, study, fs::path("confirm") / "confirm.ckpt");
  write_file_atomic(study.output_dir / "confirm" / "confirm.json", trial_result_to_json(result));
  if (!result.ok()) throw StudyError("confirmation run failed: " + result.error);

  std::ostringstream summary;
  summary << "metric,observed,predicted\n";
  const auto record = to_record(result);
  for (auto metric : analysis::kAllMetrics) {
    summary << analysis::metric_name(metric) << ',' << util::format_double(record.value(metric)) << ',';
    if (metric == optimum.metric) summary << util::format_double(optimum.predicted);
    summary << '\n';
  }
  write_file_atomic(study.output_dir / "confirm" / "summary.csv", summary.str());
  return {std::move(result), optimum};
}

analysis::ReportArtifacts AnalysisBundle::artifacts() const { return {{effects}, intervals, sn, optimum}; }

AnalysisBundle analyze(const analysis::ResponseTable& table, analysis::Metric metric, analysis::Objective objective) {
  auto effects = analysis::main_effects(table, metric);
  auto ranking = analysis::rank_factors(effects);
  std::vector<analysis::IntervalSummary> intervals;
  for (auto m : analysis::kAllMetrics) intervals.push_back(analysis::interval_summary(table, m));
  auto sn = analysis::sn_effects(table, metric, objective);
  auto optimum = analysis::predict_best(effects, objective);
  return {std::move(effects), std::move(ranking), std::move(intervals), std::move(sn), std::move(optimum)};
}

AnalysisBundle replay(std::istream& plan, std::istream& responses, analysis::Metric metric,
                      analysis::Objective objective) {
  auto parsed = doe::load_plan_fixture(plan);
  analysis::ResponseTable table(std::move(parsed), analysis::read_responses(responses));
  return analyze(table, metric, objective);
}

fs::path fixture_plan_path() { return fs::path(TAGUCHI_FIXTURE_DIR) / "reference_plan.csv"; }
fs::path fixture_responses_path() { return fs::path(TAGUCHI_FIXTURE_DIR) / "reference_responses.csv"; }

}  // namespace taguchi::harness
