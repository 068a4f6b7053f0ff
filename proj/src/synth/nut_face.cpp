#include "taguchi/synth/generator.hpp"
#include "noise.hpp"

#include "taguchi/util/random.hpp"

#include <cmath>
#include <numbers>

namespace taguchi::synth {

std::string_view label_name(Label label) { return label == Label::Defective ? "defective" : "non_defective"; }

Label parse_label(std::string_view name) {
  if (name == "defective") return Label::Defective;
  if (name == "non_defective") return Label::NonDefective;
  throw SynthError("unknown label '" + std::string(name) + "'");
}

std::string_view defect_name(DefectKind kind) {
  switch (kind) {
    case DefectKind::Scratch: return "scratch";
    case DefectKind::Dent: return "dent";
    case DefectKind::Crack: return "crack";
    case DefectKind::Wrinkle: return "wrinkle";
  }
  return "unknown";
}

DefectKind parse_defect(std::string_view name) {
  for (auto kind : kAllDefects)
    if (defect_name(kind) == name) return kind;
  throw SynthError("unknown defect kind '" + std::string(name) + "'");
}

bool NutGeometry::contains(double x, double y) const {
  const double dx = x - center_x, dy = y - center_y;
  if (dx * dx + dy * dy < hole_radius * hole_radius) return false;
  const double apothem = radius * std::numbers::sqrt3 / 2.0;
  for (int k = 0; k < 3; ++k) {
    const double angle = rotation + std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
    if (std::abs(dx * std::cos(angle) + dy * std::sin(angle)) > apothem) return false;
  }
  return true;
}

Eigen::ArrayXd face_mask(const NutGeometry& geometry, Index size) {
  Eigen::ArrayXd mask(size * size);
  for (Index y = 0; y < size; ++y)
    for (Index x = 0; x < size; ++x)
      mask(y * size + x) = geometry.contains(static_cast<double>(x), static_cast<double>(y)) ? 1.0 : 0.0;
  return mask;
}

ValueNoise::ValueNoise(util::Rng& rng, int cells) : cells_(cells), lattice_(cells + 1, cells + 1) {
  for (Index j = 0; j <= cells; ++j)
    for (Index i = 0; i <= cells; ++i) lattice_(j, i) = util::uniform01(rng);
}

double ValueNoise::operator()(double u, double v) const {
  const double fx = std::clamp(u, 0.0, 1.0) * cells_, fy = std::clamp(v, 0.0, 1.0) * cells_;
  const int ix = std::min(static_cast<int>(fx), cells_ - 1), iy = std::min(static_cast<int>(fy), cells_ - 1);
  const auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
  const double tx = smooth(fx - ix), ty = smooth(fy - iy);
  const double top = lattice_(iy, ix) * (1 - tx) + lattice_(iy, ix + 1) * tx;
  const double bottom = lattice_(iy + 1, ix) * (1 - tx) + lattice_(iy + 1, ix + 1) * tx;
  return top * (1 - ty) + bottom * ty;
}

ImageSample generate_nut_face(std::uint64_t seed, Index size) {
  if (size < kMinImageSize)
    throw SynthError("image size " + std::to_string(size) + " is below the minimum of " + std::to_string(kMinImageSize));
  util::Rng rng(seed);
  const double s = static_cast<double>(size);
  const double mid = (s - 1.0) / 2.0;

  NutGeometry g;
  g.center_x = mid + util::uniform(rng, -0.03, 0.03) * s;
  g.center_y = mid + util::uniform(rng, -0.03, 0.03) * s;
  g.radius = util::uniform(rng, 0.36, 0.44) * s;
  g.rotation = util::uniform(rng, 0.0, std::numbers::pi / 3.0);
  g.hole_radius = util::uniform(rng, 0.28, 0.34) * g.radius;

  const double illumination = util::uniform(rng, 0.9, 1.05);
  const double light_angle = util::uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double light_strength = util::uniform(rng, 0.0, 0.1);
  const double base = util::uniform(rng, 0.5, 0.62);
  const double tint = util::uniform(rng, 0.0, 0.05);
  const double metal[3] = {base * (1.0 - tint), base, base * (1.0 + tint)};

  const ValueNoise coarse(rng, 5), fine(rng, 13), backdrop(rng, 4);

  ImageSample sample;
  sample.size = size;
  sample.pixels.resize(3, size * size);
  sample.label = Label::NonDefective;
  sample.provenance.seed = seed;
  sample.geometry = g;

  const double lx = std::cos(light_angle), ly = std::sin(light_angle);
  for (Index y = 0; y < size; ++y) {
    for (Index x = 0; x < size; ++x) {
      const double px = static_cast<double>(x), py = static_cast<double>(y);
      const double u = px / (s - 1.0), v = py / (s - 1.0);
      const double grain = util::uniform(rng, -0.02, 0.02);
      const double dx = px - g.center_x, dy = py - g.center_y;
      double rgb[3];
      if (g.contains(px, py)) {
        const double texture = 0.95 + 0.06 * coarse(u, v) + 0.03 * fine(u, v);
        const double light = illumination * (1.0 + light_strength * (dx * lx + dy * ly) / g.radius);
        for (int c = 0; c < 3; ++c) rgb[c] = metal[c] * texture * light + grain;
      } else if (dx * dx + dy * dy < g.hole_radius * g.hole_radius) {
        for (double& c : rgb) c = 0.03 + grain * 0.5;
      } else {
        const double level = (0.06 + 0.06 * backdrop(u, v)) * illumination;
        for (double& c : rgb) c = level + grain * 0.5;
      }
      for (int c = 0; c < 3; ++c) sample.pixels(c, y * size + x) = std::clamp(rgb[c], 0.0, 1.0);
    }
  }
  return sample;
}

}  // namespace taguchi::synth
