#pragma once

#include "taguchi/synth/generator.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace taguchi::synth {

struct DatasetSpec {
  Index image_size = 32;
  Index per_class = 100;
  std::uint64_t seed = 1;
  std::array<double, 4> defect_mix{0.25, 0.25, 0.25, 0.25};  // scratch, dent, crack, wrinkle
  AugmentRanges augmentation;
  double train_fraction = 0.8;
};

/// Throws SynthError when the spec is inconsistent.
void validate(const DatasetSpec& spec);

struct SplitDataset {
  std::vector<ImageSample> train;
  std::vector<ImageSample> test;
  double train_fraction = 0.8;
};

/// Balanced, augmented dataset split into floor(train_fraction * N) training samples,
/// stratified by class. Sample i of each class draws from its own stream derived from
/// (seed, class, i), so the result depends only on the spec.
SplitDataset build_dataset(const DatasetSpec& spec);

/// Train count per class: largest-remainder split of floor(train_fraction * total),
/// non-defective first.
std::array<Index, 2> stratified_train_counts(Index non_defective, Index defective, double train_fraction);

/// Writes images/<split>_<nnnn>.ppm (binary 16-bit PPM) and manifest.csv with columns
/// filename,label,split,seed,defect,brightness,scale.
void export_dataset(const SplitDataset& data, const std::filesystem::path& directory);

/// Reads the layout written by export_dataset. All images must be square and of one size.
SplitDataset import_dataset(const std::filesystem::path& directory);

void write_ppm(const std::filesystem::path& path, const ImageSample& image);
/// Reads binary PPM (P6) with maxval up to 65535; the image must be square.
ImageSample read_ppm(const std::filesystem::path& path);

}  // namespace taguchi::synth
