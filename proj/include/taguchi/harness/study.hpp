#pragma once

#include "taguchi/analysis/effects.hpp"
#include "taguchi/analysis/interval.hpp"
#include "taguchi/analysis/report.hpp"
#include "taguchi/harness/trial.hpp"

#include <iosfwd>
#include <optional>

namespace taguchi::harness {

/// Some trial failed or could not be run.
class StudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

doe::ExperimentPlan make_plan(const StudyConfig& study);

struct StudyOutcome {
  doe::ExperimentPlan plan;
  std::vector<TrialResult> results;  // plan order
  std::vector<int> executed_runs;    // runs trained in this invocation (others were resumed)
  analysis::ResponseTable responses;
};

/// Runs every plan trial not already persisted under output_dir/trials, up to
/// `parallel` at a time, then writes plan.csv and responses.csv. Each trial's
/// randomness depends only on (study seed, run index). Throws StudyError, after all
/// runnable trials finish, when any trial failed.
StudyOutcome run_study(const StudyConfig& study, std::ostream* log = nullptr);

std::filesystem::path trial_result_path(const StudyConfig& study, int run_index);

/// Reads plan.csv and responses.csv from a finished study directory.
analysis::ResponseTable load_study_responses(const StudyConfig& study);

struct Confirmation {
  TrialResult result;
  analysis::PredictedOptimum optimum;
};

/// Trains the predicted-best configuration (run index 0) with the study budget and
/// writes output_dir/confirm/{confirm.json, confirm.ckpt, summary.csv}.
Confirmation confirm(const StudyConfig& study, const analysis::PredictedOptimum& optimum);

struct AnalysisBundle {
  analysis::MainEffectsTable effects;
  std::vector<std::string> ranking;
  std::vector<analysis::IntervalSummary> intervals;  // one per metric
  analysis::SnTable sn;
  analysis::PredictedOptimum optimum;

  analysis::ReportArtifacts artifacts() const;
};

AnalysisBundle analyze(const analysis::ResponseTable& table, analysis::Metric metric, analysis::Objective objective);

/// Parses a plan and a response table and analyses them; no training.
AnalysisBundle replay(std::istream& plan, std::istream& responses,
                      analysis::Metric metric = analysis::Metric::ValAccuracy,
                      analysis::Objective objective = analysis::Objective::LargerIsBetter);

std::filesystem::path fixture_plan_path();
std::filesystem::path fixture_responses_path();

}  // namespace taguchi::harness
