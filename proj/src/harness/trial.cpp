#include "taguchi/harness/trial.hpp"

#include "taguchi/nn/checkpoint.hpp"
#include "taguchi/util/random.hpp"
#include "taguchi/util/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>

namespace taguchi::harness {

using nlohmann::json;

namespace {

std::string lower(std::string_view text) {
  std::string out(util::trim(text));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void unknown_level(std::string_view factor, std::string_view label) {
  throw TrialError("factor '" + std::string(factor) + "': unknown level '" + std::string(label) + "'");
}

std::string level_or(const doe::TrialConfig& trial, std::string_view factor, std::string_view fallback) {
  return trial.has(factor) ? trial.level(factor) : std::string(fallback);
}

Index parse_kernel(std::string_view label) {
  // "[3x3]" or "3x3"; only square kernels
  std::string text = lower(label);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  const auto x = text.find('x');
  if (x == std::string::npos) unknown_level("filter_size", label);
  long long h = 0, w = 0;
  if (!util::parse_int(std::string_view(text).substr(0, x), h) || !util::parse_int(std::string_view(text).substr(x + 1), w) ||
      h != w || h < 1 || h > 7)
    unknown_level("filter_size", label);
  return static_cast<Index>(h);
}

}  // namespace

std::vector<int> layer_template(int layers) {
  switch (layers) {
    case 6: return {2, 2, 1, 1};
    case 8: return {2, 2, 2, 2};
    case 10: return {3, 3, 2, 2};
    case 12: return {3, 3, 3, 3};
    default: throw TrialError("factor 'layers': unknown level '" + std::to_string(layers) + "'");
  }
}

MaterializedTrial materialize_trial(const doe::TrialConfig& trial, const StudyConfig& study) {
  const std::string layers_label = level_or(trial, "layers", "10");
  const std::string size_label = level_or(trial, "image_size", "[100x100]");
  const std::string optimizer_label = level_or(trial, "optimizer", "adam");
  const std::string loss_label = level_or(trial, "loss", "Sqd. Hinge");
  const std::string activation_label = level_or(trial, "activation", "ReLU6");
  const std::string filter_label = level_or(trial, "filter_size", "[3x3]");

  long long layers = 0;
  if (!util::parse_int(layers_label, layers) || (layers != 6 && layers != 8 && layers != 10 && layers != 12))
    unknown_level("layers", layers_label);

  const auto px = study.image_size_px.find(std::string(util::trim(size_label)));
  if (px == study.image_size_px.end()) unknown_level("image_size", size_label);

  MaterializedTrial out;
  const std::string optimizer = lower(optimizer_label);
  if (optimizer == "adam")
    out.training.optimizer = nn::Adam{study.budget.learning_rate};
  else if (optimizer == "sgd")
    out.training.optimizer = nn::Sgd{study.budget.learning_rate};
  else
    unknown_level("optimizer", optimizer_label);

  const std::string loss = lower(loss_label);
  if (loss == "hinge")
    out.training.loss = nn::LossKind::Hinge;
  else if (loss == "sqd. hinge" || loss == "squared hinge" || loss == "squared_hinge")
    out.training.loss = nn::LossKind::SquaredHinge;
  else
    unknown_level("loss", loss_label);

  nn::Activation activation{};
  const std::string act = lower(activation_label);
  if (act == "relu")
    activation = nn::Activation::Relu;
  else if (act == "relu6")
    activation = nn::Activation::Relu6;
  else
    unknown_level("activation", activation_label);

  const Index kernel = parse_kernel(filter_label);
  const auto blocks = layer_template(static_cast<int>(layers));
  const std::array<Index, 4> widths{32, 64, 128, 256};
  const Index side = px->second;
  out.model = nn::block_cnn(nn::FeatureShape::spatial(side, side, 3), blocks, widths, kernel, activation);

  out.training.batch_size = study.budget.batch_size;
  out.training.epochs = study.budget.epochs;
  out.training.precision = study.budget.precision;
  out.training.seed = util::mix_seed(study.seed, static_cast<std::uint64_t>(trial.run_index));

  out.dataset = study.dataset;
  out.dataset.image_size = side;
  return out;
}

nn::LabeledData to_labeled(std::span<const synth::ImageSample> samples, bool standardize) {
  if (samples.empty()) return {};
  const Index side = samples.front().size;
  const Index n = static_cast<Index>(samples.size());
  nn::LabeledData data{nn::Tensor(n, nn::FeatureShape::spatial(side, side, 3)), Eigen::RowVectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (s.size != side) throw TrialError("mixed image sizes in one dataset");
    auto image = data.images.sample(i);
    image = s.pixels;
    if (standardize) {
      const double mean = image.mean();
      const double sd = std::sqrt((image.array() - mean).square().mean());
      image.array() = (image.array() - mean) / std::max(sd, kMinStddev);
    }
    data.labels(i) = synth::target(s.label);
  }
  return data;
}

TrialResult run_trial(const doe::TrialConfig& trial, const StudyConfig& study,
                      const std::filesystem::path& checkpoint) {
  const auto materialized = materialize_trial(trial, study);
  TrialResult result;
  result.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto data = synth::build_dataset(materialized.dataset);
    const auto fit =
        nn::train(materialized.model, to_labeled(data.train, study.budget.standardize),
                  to_labeled(data.test, study.budget.standardize), materialized.training);
    result.history = fit.history;
    result.best = fit.best;
    result.best_epoch = fit.best_epoch;
    if (!checkpoint.empty()) {
      const auto path = study.output_dir / checkpoint;
      std::filesystem::create_directories(path.parent_path());
      auto partial = path;
      partial += ".part";
      nn::save_checkpoint(partial, materialized.model, fit.best_params);
      std::filesystem::rename(partial, path);
      result.checkpoint = checkpoint;
    }
  } catch (const nn::TrainingError& e) {
    result.error = e.what();
  } catch (const synth::SynthError& e) {
    result.error = e.what();
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

json metrics_json(const nn::EpochMetrics& m) {
  return {{"train_loss", m.train_loss},
          {"train_accuracy", m.train_accuracy},
          {"val_loss", m.val_loss},
          {"val_accuracy", m.val_accuracy}};
}

nn::EpochMetrics metrics_from(const json& j) {
  return {j.at("train_loss").get<double>(), j.at("train_accuracy").get<double>(), j.at("val_loss").get<double>(),
          j.at("val_accuracy").get<double>()};
}

}  // namespace

std::string trial_result_to_json(const TrialResult& result) {
  json root;
  root["run"] = result.trial.run_index;
  root["settings"] = json::array();
  for (const auto& [factor, level] : result.trial.settings)
    root["settings"].push_back({{"factor", factor}, {"level", level}});
  root["best_epoch"] = result.best_epoch;
  root["best"] = metrics_json(result.best);
  root["history"] = json::array();
  for (const auto& m : result.history) root["history"].push_back(metrics_json(m));
  root["seconds"] = result.seconds;
  root["checkpoint"] = result.checkpoint.generic_string();
  root["error"] = result.error;
  return root.dump(2) + "\n";
}

TrialResult trial_result_from_json(const std::string& text) {
  try {
    const auto root = json::parse(text);
    TrialResult result;
    result.trial.run_index = root.at("run").get<int>();
    for (const auto& s : root.at("settings"))
      result.trial.settings.emplace_back(s.at("factor").get<std::string>(), s.at("level").get<std::string>());
    result.best_epoch = root.at("best_epoch").get<std::size_t>();
    result.best = metrics_from(root.at("best"));
    for (const auto& m : root.at("history")) result.history.push_back(metrics_from(m));
    result.seconds = root.at("seconds").get<double>();
    result.checkpoint = root.at("checkpoint").get<std::string>();
    result.error = root.at("error").get<std::string>();
    return result;
  } catch (const json::exception& e) {
    throw TrialError(std::string("malformed trial result: ") + e.what());
  }
}

}  // namespace taguchi::harness
