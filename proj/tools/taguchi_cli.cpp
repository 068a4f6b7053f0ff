// taguchi: plan, run and analyse Taguchi studies of small CNN classifiers.

#include "taguchi/analysis/report.hpp"
#include "taguchi/harness/study.hpp"
#include "taguchi/util/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace {

namespace fs = std::filesystem;
using namespace taguchi;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kTrial = 3 };

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> parallel;
  std::string metric = "val_accuracy";
  std::string objective;
  std::string plan;
  std::string responses;
};

harness::StudyConfig study_from(const Options& o) {
  auto study = o.config.empty() ? harness::StudyConfig{} : harness::load_study_config(o.config);
  if (o.seed) {
    // the dataset follows the study seed unless the config pinned it
    if (study.dataset.seed == study.seed) study.dataset.seed = *o.seed;
    study.seed = *o.seed;
  }
  if (o.epochs) study.budget.epochs = *o.epochs;
  if (o.parallel) study.parallel = *o.parallel;
  if (!o.out.empty()) study.output_dir = o.out;
  harness::validate(study);
  return study;
}

analysis::Metric metric_from(const Options& o) { return analysis::parse_metric(o.metric); }

analysis::Objective objective_from(const Options& o, analysis::Metric metric) {
  return o.objective.empty() ? analysis::default_objective(metric) : analysis::parse_objective(o.objective);
}

void print_bundle(const harness::AnalysisBundle& bundle) {
  auto& out = std::cout;
  out << "main effects on " << analysis::metric_name(bundle.effects.metric)
      << " (grand mean " << util::format_fixed(bundle.effects.grand_mean, 6) << ")\n";
  for (const auto& f : bundle.effects.per_factor) {
    out << "  " << std::left << std::setw(12) << f.factor << " rank " << f.rank << "  delta "
        << util::format_fixed(f.delta, 6) << " ";
    for (const auto& l : f.levels) out << "  " << l.label << '=' << util::format_fixed(l.mean, 6);
    out << '\n';
  }
  out << "ranking:";
  for (const auto& name : bundle.ranking) out << ' ' << name;
  out << "\nintervals (95%):\n";
  for (const auto& i : bundle.intervals)
    out << "  " << std::left << std::setw(15) << i.metric << util::format_fixed(i.mean, 6) << "  ["
        << util::format_fixed(i.lower(), 6) << ", " << util::format_fixed(i.upper(), 6) << "]\n";
  out << "predicted optimum (" << analysis::objective_name(bundle.optimum.objective) << "):";
  for (const auto& [factor, level] : bundle.optimum.levels) out << ' ' << factor << '=' << level;
  out << "\n  predicted " << analysis::metric_name(bundle.optimum.metric) << " "
      << util::format_fixed(bundle.optimum.predicted, 6) << '\n';
}

void emit(const harness::AnalysisBundle& bundle, const fs::path& directory) {
  const auto written = analysis::emit_report(bundle.artifacts(), directory);
  std::cout << "report: " << written.tables.size() << " tables, " << written.plots.size() << " plots in "
            << directory.string() << '\n';
}

int cmd_plan(const Options& o) {
  const auto study = study_from(o);
  const auto plan = harness::make_plan(study);
  if (o.out.empty()) {
    doe::write_plan(std::cout, plan);
    return kOk;
  }
  fs::create_directories(study.output_dir);
  std::ofstream file(study.output_dir / "plan.csv");
  doe::write_plan(file, plan);
  std::cout << "wrote " << (study.output_dir / "plan.csv").string() << '\n';
  return kOk;
}

int cmd_run(const Options& o) {
  const auto study = study_from(o);
  const auto outcome = harness::run_study(study, &std::cout);
  std::cout << outcome.executed_runs.size() << " trials run, " << outcome.results.size() - outcome.executed_runs.size()
            << " resumed; responses in " << (study.output_dir / "responses.csv").string() << '\n';
  return kOk;
}

int cmd_analyze(const Options& o) {
  const auto metric = metric_from(o);
  const auto objective = objective_from(o, metric);
  std::optional<harness::AnalysisBundle> bundle;
  fs::path report_dir;
  if (!o.responses.empty()) {
    std::ifstream plan(o.plan.empty() ? harness::fixture_plan_path() : fs::path(o.plan));
    std::ifstream responses(o.responses);
    if (!plan || !responses) throw analysis::AnalysisError("cannot open plan or responses file");
    bundle = harness::replay(plan, responses, metric, objective);
    report_dir = o.out.empty() ? fs::path("report") : fs::path(o.out);
  } else {
    const auto study = study_from(o);
    bundle = harness::analyze(harness::load_study_responses(study), metric, objective);
    report_dir = study.output_dir / "report";
  }
  print_bundle(*bundle);
  emit(*bundle, report_dir);
  return kOk;
}

int cmd_confirm(const Options& o) {
  const auto study = study_from(o);
  const auto metric = metric_from(o);
  const auto bundle = harness::analyze(harness::load_study_responses(study), metric, objective_from(o, metric));
  const auto confirmation = harness::confirm(study, bundle.optimum);
  std::cout << "confirmation run:";
  for (const auto& [factor, level] : bundle.optimum.levels) std::cout << ' ' << factor << '=' << level;
  std::cout << "\n  metric           observed    predicted\n";
  const analysis::ResponseRecord observed{0, confirmation.result.best.train_loss, confirmation.result.best.train_accuracy,
                                          confirmation.result.best.val_loss, confirmation.result.best.val_accuracy};
  for (auto m : analysis::kAllMetrics) {
    std::cout << "  " << std::left << std::setw(16) << analysis::metric_name(m) << ' '
              << util::format_fixed(observed.value(m), 6);
    if (m == bundle.optimum.metric) std::cout << "    " << util::format_fixed(bundle.optimum.predicted, 6);
    std::cout << '\n';
  }
  return kOk;
}

int cmd_replay(const Options& o) {
  const fs::path plan_path = o.plan.empty() ? harness::fixture_plan_path() : fs::path(o.plan);
  const fs::path responses_path = o.responses.empty() ? harness::fixture_responses_path() : fs::path(o.responses);
  std::ifstream plan(plan_path);
  std::ifstream responses(responses_path);
  if (!plan) throw analysis::AnalysisError("cannot open plan '" + plan_path.string() + "'");
  if (!responses) throw analysis::AnalysisError("cannot open responses '" + responses_path.string() + "'");
  const auto metric = metric_from(o);
  const auto bundle = harness::replay(plan, responses, metric, objective_from(o, metric));
  print_bundle(bundle);
  if (!o.out.empty()) emit(bundle, o.out);
  return kOk;
}

int cmd_dataset(const Options& o) {
  const auto study = study_from(o);
  const auto data = synth::build_dataset(study.dataset);
  const fs::path directory = o.out.empty() ? fs::path("dataset") : fs::path(o.out);
  synth::export_dataset(data, directory);
  std::cout << data.train.size() << " train and " << data.test.size() << " test images ("
            << study.dataset.image_size << "x" << study.dataset.image_size << ") in " << directory.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Taguchi design-of-experiments studies for CNN hyperparameters"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool training) {
    sub->add_option("--config", o.config, "study config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "study seed");
    if (training) {
      sub->add_option("--epochs", o.epochs, "epochs per trial")->check(CLI::PositiveNumber);
      sub->add_option("--parallel", o.parallel, "concurrent trials")->check(CLI::PositiveNumber);
    }
  };
  auto analysis_flags = [&](CLI::App* sub) {
    sub->add_option("--metric", o.metric, "train_loss, train_accuracy, val_loss or val_accuracy");
    sub->add_option("--objective", o.objective, "max or min (default: by metric)");
  };

  auto* plan = app.add_subcommand("plan", "print the experiment plan");
  common(plan, false);
  auto* run = app.add_subcommand("run", "train every trial of the plan (resumable)");
  common(run, true);
  auto* analyze = app.add_subcommand("analyze", "main effects, intervals and S/N for a finished study");
  common(analyze, false);
  analysis_flags(analyze);
  analyze->add_option("--plan", o.plan, "plan CSV (with --responses)");
  analyze->add_option("--responses", o.responses, "response CSV instead of a study directory");
  auto* confirm = app.add_subcommand("confirm", "train the predicted optimum of a finished study");
  common(confirm, true);
  analysis_flags(confirm);
  auto* replay = app.add_subcommand("replay", "analyse the shipped reference plan and responses");
  replay->add_option("--out", o.out, "write the report bundle here");
  replay->add_option("--plan", o.plan, "plan CSV");
  replay->add_option("--responses", o.responses, "response CSV");
  analysis_flags(replay);
  auto* dataset = app.add_subcommand("dataset", "generate and export the synthetic dataset");
  common(dataset, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*run) return cmd_run(o);
    if (*analyze) return cmd_analyze(o);
    if (*confirm) return cmd_confirm(o);
    if (*replay) return cmd_replay(o);
    if (*dataset) return cmd_dataset(o);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const doe::DesignError& e) {
    std::cerr << "design error: " << e.what() << '\n';
    return kUsage;
  } catch (const doe::ParseError& e) {
    std::cerr << "parse error (line " << e.line() << "): " << e.what() << '\n';
    return kData;
  } catch (const analysis::AnalysisError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const synth::SynthError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const harness::TrialError& e) {
    std::cerr << "trial error: " << e.what() << '\n';
    return kTrial;
  } catch (const harness::StudyError& e) {
    std::cerr << "study error: " << e.what() << '\n';
    return kTrial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
