#include "taguchi/synth/generator.hpp"

#include <cmath>

namespace taguchi::synth {

ImageSample augment(const ImageSample& sample, double brightness, double scale, const AugmentRanges& ranges) {
  if (!(brightness >= ranges.brightness_lo && brightness <= ranges.brightness_hi))
    throw SynthError("brightness factor " + std::to_string(brightness) + " outside [" +
                     std::to_string(ranges.brightness_lo) + ", " + std::to_string(ranges.brightness_hi) + "]");
  if (!(scale >= ranges.scale_lo && scale <= ranges.scale_hi))
    throw SynthError("scale factor " + std::to_string(scale) + " outside [" + std::to_string(ranges.scale_lo) + ", " +
                     std::to_string(ranges.scale_hi) + "]");

  ImageSample out = sample;
  out.provenance.brightness = sample.provenance.brightness * brightness;
  out.provenance.scale = sample.provenance.scale * scale;
  const Eigen::MatrixXd lit = (sample.pixels * brightness).cwiseMin(1.0);
  if (scale == 1.0) {
    out.pixels = lit;
    return out;
  }

  const Index n = sample.size;
  const double mid = (static_cast<double>(n) - 1.0) / 2.0;
  const double last = static_cast<double>(n - 1);
  out.pixels.setZero(3, n * n);
  for (Index y = 0; y < n; ++y) {
    for (Index x = 0; x < n; ++x) {
      const double u = mid + (static_cast<double>(x) - mid) / scale;
      const double v = mid + (static_cast<double>(y) - mid) / scale;
      if (u < 0.0 || v < 0.0 || u > last || v > last) continue;
      const Index x0 = std::min(static_cast<Index>(u), n - 2), y0 = std::min(static_cast<Index>(v), n - 2);
      const double tx = u - static_cast<double>(x0), ty = v - static_cast<double>(y0);
      out.pixels.col(y * n + x) = (1 - ty) * ((1 - tx) * lit.col(y0 * n + x0) + tx * lit.col(y0 * n + x0 + 1)) +
                                  ty * ((1 - tx) * lit.col((y0 + 1) * n + x0) + tx * lit.col((y0 + 1) * n + x0 + 1));
    }
  }
  out.pixels = out.pixels.cwiseMax(0.0).cwiseMin(1.0);

  if (sample.geometry) {
    NutGeometry g = *sample.geometry;
    g.center_x = mid + (g.center_x - mid) * scale;
    g.center_y = mid + (g.center_y - mid) * scale;
    g.radius *= scale;
    g.hole_radius *= scale;
    out.geometry = g;
  }
  return out;
}

}  // namespace taguchi::synth
