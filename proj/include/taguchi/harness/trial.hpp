#pragma once

#include "taguchi/harness/config.hpp"
#include "taguchi/nn/train.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace taguchi::harness {

class TrialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MaterializedTrial {
  nn::ModelSpec model;
  nn::TrainingConfig training;
  synth::DatasetSpec dataset;
};

/// Convolutions per width block (32, 64, 128, 256) for the layer-count levels:
/// 6 -> (2,2,1,1), 8 -> (2,2,2,2), 10 -> (3,3,2,2), 12 -> (3,3,3,3).
std::vector<int> layer_template(int layers);

/// Maps a trial's levels onto a model, training and dataset configuration. Factors the
/// study does not vary take the levels 10, [100x100], adam, Sqd. Hinge, ReLU6, [3x3].
/// Throws TrialError naming the factor and label for an unknown level.
MaterializedTrial materialize_trial(const doe::TrialConfig& trial, const StudyConfig& study);

inline constexpr double kMinStddev = 1e-3;

/// Stacks samples into a training tensor with +-1 targets. With standardize, each image
/// is shifted and scaled to zero mean and unit variance over all its values (the
/// deviation is floored at kMinStddev).
nn::LabeledData to_labeled(std::span<const synth::ImageSample> samples, bool standardize = false);

struct TrialResult {
  doe::TrialConfig trial;
  nn::EpochMetrics best;
  std::size_t best_epoch = 0;
  std::vector<nn::EpochMetrics> history;
  double seconds = 0;
  std::filesystem::path checkpoint;  // relative to the study output directory
  std::string error;                 // empty on success

  bool ok() const { return error.empty(); }
};

/// Generates the trial's dataset, trains, and writes the best-epoch checkpoint to
/// output_dir / checkpoint (when checkpoint is non-empty). Training failures are
/// reported in TrialResult::error; an unknown level throws TrialError.
TrialResult run_trial(const doe::TrialConfig& trial, const StudyConfig& study,
                      const std::filesystem::path& checkpoint = {});

std::string trial_result_to_json(const TrialResult& result);
TrialResult trial_result_from_json(const std::string& text);

}  // namespace taguchi::harness
