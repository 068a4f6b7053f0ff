#include "taguchi/harness/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace taguchi::harness {

using nlohmann::json;

void validate(const StudyConfig& config) {
  const auto catalog = doe::cnn_study_factors();
  try {
    doe::validate_factors(config.factors);
  } catch (const doe::DesignError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& factor : config.factors) {
    const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const auto& f) { return f.name == factor.name; });
    if (it == catalog.end()) throw ConfigError("unknown factor '" + factor.name + "'");
    for (const auto& level : factor.levels)
      if (it->level_index(level) < 0)
        throw ConfigError("factor '" + factor.name + "' has no level '" + level + "'");
    if (factor.name == "image_size")
      for (const auto& level : factor.levels)
        if (!config.image_size_px.count(level)) throw ConfigError("no pixel size configured for image size " + level);
  }
  for (const auto& [label, px] : config.image_size_px)
    if (px < synth::kMinImageSize) throw ConfigError("image size for " + label + " is below 32 pixels");
  if (config.budget.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (config.budget.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(config.budget.learning_rate > 0)) throw ConfigError("learning rate must be > 0");
  if (config.parallel < 1) throw ConfigError("parallel must be >= 1");
  try {
    synth::validate(config.dataset);
  } catch (const synth::SynthError& e) {
    throw ConfigError(std::string("dataset: ") + e.what());
  }
}

StudyConfig full_scale_config() {
  StudyConfig config;
  config.image_size_px = {{"[100x100]", 100}, {"[200x200]", 200}};
  config.dataset.image_size = 100;
  config.dataset.per_class = 132;
  config.budget.epochs = 500;
  config.budget.batch_size = 32;
  return config;
}

namespace {

void reject_unknown(const json& object, std::initializer_list<const char*> keys, const std::string& section) {
  if (!object.is_object()) throw ConfigError(section + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : object.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + section);
}

template <typename T>
void read(const json& object, const char* key, T& target) {
  if (object.contains(key)) target = object.at(key).get<T>();
}

std::pair<double, double> read_range(const json& value, const char* name) {
  if (!value.is_array() || value.size() != 2) throw ConfigError(std::string(name) + " must be [lo, hi]");
  return {value[0].get<double>(), value[1].get<double>()};
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
  StudyConfig config;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(root, {"seed", "output_dir", "parallel", "array", "factors", "image_size_px", "training", "dataset"},
                   "config");
    read(root, "seed", config.seed);
    if (root.contains("output_dir")) config.output_dir = root.at("output_dir").get<std::string>();
    read(root, "parallel", config.parallel);
    read(root, "array", config.array);
    config.dataset.seed = config.seed;

    if (root.contains("factors")) {
      config.factors.clear();
      for (const auto& f : root.at("factors")) {
        reject_unknown(f, {"name", "levels"}, "factor");
        config.factors.push_back({f.at("name").get<std::string>(), f.at("levels").get<std::vector<std::string>>()});
      }
    }
    if (root.contains("image_size_px")) {
      config.image_size_px.clear();
      for (const auto& item : root.at("image_size_px").items()) config.image_size_px[item.key()] = item.value().get<Index>();
    }
    if (root.contains("training")) {
      const auto& t = root.at("training");
      reject_unknown(t, {"epochs", "batch_size", "learning_rate", "precision", "standardize"}, "training");
      read(t, "epochs", config.budget.epochs);
      read(t, "batch_size", config.budget.batch_size);
      read(t, "learning_rate", config.budget.learning_rate);
      read(t, "standardize", config.budget.standardize);
      if (t.contains("precision")) {
        try {
          config.budget.precision = nn::parse_precision(t.at("precision").get<std::string>());
        } catch (const nn::TrainingError& e) {
          throw ConfigError(e.what());
        }
      }
    }
    if (root.contains("dataset")) {
      const auto& d = root.at("dataset");
      reject_unknown(d, {"image_size", "per_class", "seed", "defect_mix", "brightness", "scale", "train_fraction"},
                     "dataset");
      read(d, "image_size", config.dataset.image_size);
      read(d, "per_class", config.dataset.per_class);
      read(d, "seed", config.dataset.seed);
      read(d, "train_fraction", config.dataset.train_fraction);
      if (d.contains("defect_mix")) {
        const auto& mix = d.at("defect_mix");
        reject_unknown(mix, {"scratch", "dent", "crack", "wrinkle"}, "dataset.defect_mix");
        for (std::size_t k = 0; k < 4; ++k) {
          const std::string name(synth::defect_name(synth::kAllDefects[k]));
          config.dataset.defect_mix[k] = mix.value(name, 0.0);
        }
      }
      if (d.contains("brightness"))
        std::tie(config.dataset.augmentation.brightness_lo, config.dataset.augmentation.brightness_hi) =
            read_range(d.at("brightness"), "dataset.brightness");
      if (d.contains("scale"))
        std::tie(config.dataset.augmentation.scale_lo, config.dataset.augmentation.scale_hi) =
            read_range(d.at("scale"), "dataset.scale");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(config);
  return config;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_study_config(text.str());
}

std::string study_config_to_json(const StudyConfig& config) {
  json root;
  root["seed"] = config.seed;
  root["output_dir"] = config.output_dir.string();
  root["parallel"] = config.parallel;
  root["array"] = config.array;
  root["factors"] = json::array();
  for (const auto& f : config.factors) root["factors"].push_back({{"name", f.name}, {"levels", f.levels}});
  root["image_size_px"] = config.image_size_px;
  root["training"] = {{"epochs", config.budget.epochs},
                      {"batch_size", config.budget.batch_size},
                      {"learning_rate", config.budget.learning_rate},
                      {"precision", nn::to_string(config.budget.precision)},
                      {"standardize", config.budget.standardize}};
  json mix;
  for (std::size_t k = 0; k < 4; ++k)
    mix[std::string(synth::defect_name(synth::kAllDefects[k]))] = config.dataset.defect_mix[k];
  const auto& a = config.dataset.augmentation;
  root["dataset"] = {{"image_size", config.dataset.image_size},
                     {"per_class", config.dataset.per_class},
                     {"seed", config.dataset.seed},
                     {"defect_mix", mix},
                     {"brightness", {a.brightness_lo, a.brightness_hi}},
                     {"scale", {a.scale_lo, a.scale_hi}},
                     {"train_fraction", config.dataset.train_fraction}};
  return root.dump(2) + "\n";
}

}  // namespace taguchi::harness
