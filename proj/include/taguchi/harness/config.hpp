#pragma once

#include "taguchi/doe/plan.hpp"
#include "taguchi/nn/train.hpp"
#include "taguchi/synth/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace taguchi::harness {

using Index = Eigen::Index;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainingBudget {
  int epochs = 30;
  Index batch_size = 8;
  double learning_rate = 1e-3;
  nn::Precision precision = nn::Precision::Single;
  bool standardize = true;  // per-image zero mean, unit variance inputs
};

inline synth::DatasetSpec desk_dataset() {
  synth::DatasetSpec spec;
  spec.seed = 2023;
  return spec;
}

/// Everything a study needs. Defaults are the desk-scale setup: 32x32 images for both
/// image_size levels, 100 images per class, 30 epochs of batch 8 in single precision.
struct StudyConfig {
  std::vector<doe::Factor> factors = doe::cnn_study_factors();
  std::string array = "L16_mixed";
  synth::DatasetSpec dataset = desk_dataset();
  std::map<std::string, Index> image_size_px{{"[100x100]", 32}, {"[200x200]", 32}};
  TrainingBudget budget;
  std::filesystem::path output_dir = "study";
  std::uint64_t seed = 2023;
  int parallel = 1;
};

/// Factor names must come from the CNN study catalog and levels must be a subset of
/// that factor's catalog levels. Throws ConfigError.
void validate(const StudyConfig& config);

/// 100x100 / 200x200 inputs, 132 images per class, 500 epochs of batch 32.
StudyConfig full_scale_config();

/// JSON text with the sections documented in the README. Unknown keys are rejected.
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::filesystem::path& path);
std::string study_config_to_json(const StudyConfig& config);

}  // namespace taguchi::harness
