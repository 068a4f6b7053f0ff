#include "taguchi/synth/dataset.hpp"

#include "taguchi/util/random.hpp"

#include <cmath>

namespace taguchi::synth {

void validate(const DatasetSpec& spec) {
  if (spec.image_size < kMinImageSize)
    throw SynthError("image size must be at least " + std::to_string(kMinImageSize));
  if (spec.per_class < 1) throw SynthError("per-class count must be >= 1");
  double total = 0;
  for (double p : spec.defect_mix) {
    if (p < 0) throw SynthError("defect proportions must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw SynthError("defect proportions must sum to 1");
  const auto& a = spec.augmentation;
  if (!(a.brightness_lo > 0 && a.brightness_lo <= a.brightness_hi))
    throw SynthError("brightness range must be positive and ordered");
  if (!(a.scale_lo > 0 && a.scale_lo <= a.scale_hi)) throw SynthError("scale range must be positive and ordered");
  if (!(spec.train_fraction > 0 && spec.train_fraction < 1)) throw SynthError("train fraction must be in (0, 1)");
}

std::array<Index, 2> stratified_train_counts(Index non_defective, Index defective, double train_fraction) {
  const Index total = non_defective + defective;
  const Index train_total = static_cast<Index>(std::floor(train_fraction * static_cast<double>(total)));
  const double quota[2] = {static_cast<double>(train_total) * static_cast<double>(non_defective) / static_cast<double>(total),
                           static_cast<double>(train_total) * static_cast<double>(defective) / static_cast<double>(total)};
  std::array<Index, 2> counts{static_cast<Index>(std::floor(quota[0])), static_cast<Index>(std::floor(quota[1]))};
  Index remaining = train_total - counts[0] - counts[1];
  // Largest remainder first; equal remainders go to the earlier class.
  const int first = (quota[1] - static_cast<double>(counts[1])) > (quota[0] - static_cast<double>(counts[0])) ? 1 : 0;
  for (int k = 0; remaining > 0; ++k, --remaining) ++counts[static_cast<std::size_t>((first + k) % 2)];
  return counts;
}

namespace {

ImageSample make_sample(const DatasetSpec& spec, Label label, Index index) {
  util::Rng rng(util::mix_seed(util::mix_seed(spec.seed, label == Label::Defective ? 1 : 0),
                               static_cast<std::uint64_t>(index)));
  const std::uint64_t face_seed = rng();
  const std::uint64_t defect_seed = rng();
  const double pick = util::uniform01(rng);
  const auto& a = spec.augmentation;
  const double brightness = util::uniform(rng, a.brightness_lo, a.brightness_hi);
  const double scale = util::uniform(rng, a.scale_lo, a.scale_hi);

  ImageSample sample = generate_nut_face(face_seed, spec.image_size);
  if (label == Label::Defective) {
    DefectKind kind = DefectKind::Wrinkle;
    double cumulative = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      cumulative += spec.defect_mix[k];
      if (spec.defect_mix[k] > 0 && pick < cumulative) {
        kind = kAllDefects[k];
        break;
      }
    }
    sample = apply_defect(sample, kind, defect_seed);
  }
  return augment(sample, brightness, scale, a);
}

}  // namespace

SplitDataset build_dataset(const DatasetSpec& spec) {
  validate(spec);
  const auto train_counts = stratified_train_counts(spec.per_class, spec.per_class, spec.train_fraction);
  SplitDataset data;
  data.train_fraction = spec.train_fraction;
  const Label labels[2] = {Label::NonDefective, Label::Defective};
  for (std::size_t c = 0; c < 2; ++c) {
    for (Index i = 0; i < spec.per_class; ++i) {
      auto sample = make_sample(spec, labels[c], i);
      (i < train_counts[c] ? data.train : data.test).push_back(std::move(sample));
    }
  }
  return data;
}

}  // namespace taguchi::synth
