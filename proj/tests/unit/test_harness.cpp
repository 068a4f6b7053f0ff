#include "taguchi/harness/study.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace taguchi;
using namespace taguchi::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

doe::TrialConfig fixture_trial(int run) {
  std::ifstream in(fixture_plan_path());
  const auto plan = doe::load_plan_fixture(in);
  return plan.trials.at(run - 1);
}

StudyConfig tiny_study(const fs::path& dir) {
  StudyConfig study;
  study.array = "L4";
  study.factors = {{"filter_size", {"[2x2]", "[3x3]"}}, {"loss", {"Hinge", "Sqd. Hinge"}}, {"activation", {"ReLU", "ReLU6"}}};
  study.dataset.per_class = 8;
  study.budget.epochs = 2;
  study.seed = 99;
  study.output_dir = dir;
  return study;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("layer templates") {
  CHECK(layer_template(6) == std::vector<int>{2, 2, 1, 1});
  CHECK(layer_template(10) == std::vector<int>{3, 3, 2, 2});
  CHECK(layer_template(12) == std::vector<int>{3, 3, 3, 3});
  CHECK_THROWS_AS(layer_template(7), TrialError);
}

TEST_CASE("materialize run 12 at full scale") {
  const auto trial = fixture_trial(12);
  const auto m = materialize_trial(trial, full_scale_config());
  CHECK(to_string(m.model.input) == "(200, 200, 3)");
  CHECK(m.dataset.image_size == 200);
  CHECK(m.dataset.per_class == 132);
  CHECK(std::holds_alternative<nn::Adam>(m.training.optimizer));
  CHECK(m.training.loss == nn::LossKind::SquaredHinge);
  CHECK(m.training.epochs == 500);
  std::vector<Index> filters;
  for (const auto& layer : m.model.layers)
    if (const auto* conv = std::get_if<nn::Conv2D>(&layer)) {
      filters.push_back(conv->filters);
      CHECK(conv->kernel_h == 3);
      CHECK(conv->kernel_w == 3);
      CHECK(conv->activation == nn::Activation::Relu);
    }
  CHECK(filters == std::vector<Index>{32, 32, 32, 64, 64, 64, 128, 128, 256, 256});
  CHECK(std::holds_alternative<nn::Dense>(m.model.layers.back()));
}

TEST_CASE("materialize fills defaults and names bad levels") {
  StudyConfig study;
  const auto defaults = materialize_trial({1, {}}, study);
  CHECK(to_string(defaults.model.input) == "(32, 32, 3)");
  CHECK(defaults.training.precision == nn::Precision::Single);
  CHECK(defaults.training.batch_size == 8);
  std::size_t convs = 0;
  for (const auto& layer : defaults.model.layers) convs += std::holds_alternative<nn::Conv2D>(layer);
  CHECK(convs == 10);

  const auto sgd = materialize_trial({2, {{"optimizer", "SGD"}, {"loss", "Hinge"}}}, study);
  CHECK(std::holds_alternative<nn::Sgd>(sgd.training.optimizer));
  CHECK(sgd.training.loss == nn::LossKind::Hinge);
  CHECK(sgd.training.seed != defaults.training.seed);

  try {
    materialize_trial({3, {{"activation", "relu7"}}}, study);
    FAIL("expected TrialError");
  } catch (const TrialError& e) {
    const std::string what = e.what();
    CHECK(what.find("activation") != std::string::npos);
    CHECK(what.find("relu7") != std::string::npos);
  }
}

TEST_CASE("standardised inputs have zero mean and unit deviation per image") {
  synth::DatasetSpec spec;
  spec.per_class = 3;
  const auto data = synth::build_dataset(spec);
  const auto raw = to_labeled(data.train), standard = to_labeled(data.train, true);
  const Index per = 32 * 32 * 3;
  for (Index i = 0; i < standard.images.batch(); ++i) {
    Eigen::Map<const Eigen::ArrayXd> x(standard.images.values().data() + i * per, per);
    CHECK(std::abs(x.mean()) < 1e-12);
    CHECK(std::abs(std::sqrt((x - x.mean()).square().mean()) - 1.0) < 1e-9);
    CHECK(raw.labels(i) == standard.labels(i));
  }
}

TEST_CASE("study config round trip and validation") {
  StudyConfig config = full_scale_config();
  config.seed = 17;
  config.budget.precision = nn::Precision::Double;
  const auto text = study_config_to_json(config);
  CHECK(study_config_to_json(parse_study_config(text)) == text);

  CHECK_THROWS_AS(parse_study_config(R"({"seed": 1, "sead": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"training": {"epoch": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"factors": [{"name": "activation", "levels": ["ReLU", "relu7"]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"image_size_px": {"[100x100]": 16}})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config("{not json"), ConfigError);
  const auto partial = parse_study_config(R"({"seed": 5, "training": {"epochs": 3}})");
  CHECK(partial.seed == 5);
  CHECK(partial.dataset.seed == 5);
  CHECK(partial.budget.epochs == 3);
  CHECK(partial.budget.batch_size == 8);
}

TEST_CASE("trial results serialise losslessly") {
  TrialResult r;
  r.trial = {4, {{"layers", "8"}, {"loss", "Hinge"}}};
  r.best = {0.1, 0.2, 1.0 / 3.0, 0.9};
  r.best_epoch = 1;
  r.history = {{0.5, 0.5, 0.6, 0.5}, r.best};
  r.seconds = 1.25;
  r.checkpoint = "checkpoints/run_04.ckpt";
  const auto back = trial_result_from_json(trial_result_to_json(r));
  CHECK(back.trial.run_index == 4);
  CHECK(back.trial.settings == r.trial.settings);
  CHECK(back.best == r.best);
  CHECK(back.history == r.history);
  CHECK(back.checkpoint == r.checkpoint);
  CHECK(back.ok());
}

TEST_CASE("study runs, resumes one missing trial and stays deterministic") {
  const auto dir = fresh_dir("taguchi_study_a");
  const auto study = tiny_study(dir);
  const auto first = run_study(study);
  CHECK(first.executed_runs == std::vector<int>{1, 2, 3, 4});
  CHECK(fs::exists(dir / "plan.csv"));
  CHECK(fs::exists(dir / "checkpoints" / "run_03.ckpt"));
  const auto responses = slurp(dir / "responses.csv");

  fs::remove(trial_result_path(study, 3));
  const auto resumed = run_study(study);
  CHECK(resumed.executed_runs == std::vector<int>{3});
  CHECK(slurp(dir / "responses.csv") == responses);
  CHECK(run_study(study).executed_runs.empty());

  auto parallel = tiny_study(fresh_dir("taguchi_study_b"));
  parallel.parallel = 2;
  run_study(parallel);
  CHECK(slurp(parallel.output_dir / "responses.csv") == responses);

  auto changed = study;
  changed.seed = 100;
  CHECK_THROWS_AS(run_study(changed), StudyError);

  const auto table = load_study_responses(study);
  CHECK(table.records().size() == 4);

  fs::remove_all(dir);
  fs::remove_all(parallel.output_dir);
}

TEST_CASE("a diverging trial fails the study but keeps the others") {
  // plain SGD on 12 samples through ten ReLU convolutions overflows within two steps
  const auto dir = fresh_dir("taguchi_study_diverge");
  auto study = tiny_study(dir);
  study.factors[0] = {"optimizer", {"adam", "sgd"}};
  try {
    run_study(study);
    FAIL("expected StudyError");
  } catch (const StudyError& e) {
    const std::string what = e.what();
    CHECK(what.find("run 4") != std::string::npos);
    CHECK(what.find("diverged") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "responses.csv"));
  CHECK_FALSE(trial_result_from_json(slurp(trial_result_path(study, 4))).ok());
  CHECK(trial_result_from_json(slurp(trial_result_path(study, 1))).ok());
  CHECK_THROWS_AS(run_study(study), StudyError);
  fs::remove_all(dir);
}

TEST_CASE("confirm is the shared trial path with run index 0") {
  const auto dir = fresh_dir("taguchi_study_confirm");
  const auto study = tiny_study(dir);
  analysis::PredictedOptimum optimum;
  optimum.levels = {{"filter_size", "[3x3]"}, {"loss", "Sqd. Hinge"}, {"activation", "ReLU6"}};
  optimum.predicted = 0.75;
  const auto confirmed = confirm(study, optimum);
  const auto direct = run_trial({0, optimum.levels}, study);
  CHECK(confirmed.result.history == direct.history);
  CHECK(confirmed.result.best == direct.best);
  CHECK(fs::exists(dir / "confirm" / "summary.csv"));
  CHECK(fs::exists(dir / "confirm" / "confirm.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("replay of the published responses") {
  std::ifstream plan(fixture_plan_path()), responses(fixture_responses_path());
  const auto bundle = replay(plan, responses);
  CHECK(bundle.ranking.front() == "layers");
  CHECK(bundle.ranking.back() == "activation");
  const std::vector<std::pair<std::string, std::string>> expected{
      {"layers", "10"}, {"image_size", "[100x100]"}, {"optimizer", "adam"},
      {"loss", "Sqd. Hinge"}, {"activation", "ReLU6"}, {"filter_size", "[3x3]"}};
  CHECK(bundle.optimum.levels == expected);
  CHECK(bundle.intervals.size() == 4);

  std::ifstream plan_again(fixture_plan_path()), full(fixture_responses_path());
  std::string text((std::istreambuf_iterator<char>(full)), {});
  text = text.substr(0, text.rfind('\n', text.size() - 2) + 1);  // drop run 16
  std::istringstream truncated(text);
  CHECK_THROWS(replay(plan_again, truncated));
}
