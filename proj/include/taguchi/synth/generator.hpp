#pragma once

#include "taguchi/synth/sample.hpp"

namespace taguchi::synth {

inline constexpr Index kMinImageSize = 32;

/// Defect-free hexagonal nut face over a dark background: value-noise metal texture,
/// random rotation, position jitter, illumination level and light gradient.
/// Deterministic in (seed, size). Throws SynthError for size < 32.
ImageSample generate_nut_face(std::uint64_t seed, Index size);

/// Renders one defect inside the face mask and relabels the sample as defective.
///   scratch: thin bright or dark polyline, under 5% of face pixels
///   dent:    darkened elliptical gradient blob, 5-20% of face pixels
///   crack:   jagged dark polyline, possibly branched
///   wrinkle: low-frequency ridge pattern under a smooth window
/// Throws SynthError when the sample is already defective or has no geometry.
ImageSample apply_defect(const ImageSample& sample, DefectKind kind, std::uint64_t seed);

struct AugmentRanges {
  double brightness_lo = 0.8;
  double brightness_hi = 1.2;
  double scale_lo = 0.9;
  double scale_hi = 1.1;
};

/// Multiplies by brightness, then zooms about the image centre by scale with bilinear
/// resampling (zero padding outside the source), keeping the original size. Pixels are
/// clamped to [0, 1]; the label is preserved. Throws SynthError for a factor outside
/// ranges.
ImageSample augment(const ImageSample& sample, double brightness, double scale, const AugmentRanges& ranges = {});

}  // namespace taguchi::synth
