#include "noise.hpp"
#include "taguchi/synth/generator.hpp"

#include "taguchi/util/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace taguchi::synth {

namespace {

struct Point {
  double x, y;
};

double segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

double polyline_distance(Point p, const std::vector<std::vector<Point>>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines)
    for (std::size_t i = 1; i < line.size(); ++i) best = std::min(best, segment_distance(p, line[i - 1], line[i]));
  return best;
}

Point random_face_point(util::Rng& rng, const NutGeometry& g) {
  for (int attempt = 0; attempt < 4096; ++attempt) {
    const double r = util::uniform(rng, g.hole_radius + 0.25 * (g.radius - g.hole_radius), 0.75 * g.radius);
    const double a = util::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Point p{g.center_x + r * std::cos(a), g.center_y + r * std::sin(a)};
    if (g.contains(p.x, p.y)) return p;
  }
  return {g.center_x + 0.6 * g.radius, g.center_y};
}

std::vector<Point> walk(util::Rng& rng, Point start, double heading, int steps, double step_lo, double step_hi,
                        double turn) {
  std::vector<Point> line{start};
  for (int i = 0; i < steps; ++i) {
    heading += util::uniform(rng, -turn, turn);
    const double len = util::uniform(rng, step_lo, step_hi);
    line.push_back({line.back().x + len * std::cos(heading), line.back().y + len * std::sin(heading)});
  }
  return line;
}

// Per-pixel multiplier/target rendering of one defect attempt.
Eigen::MatrixXd render(const ImageSample& in, const Eigen::ArrayXd& mask, DefectKind kind, util::Rng& rng) {
  const NutGeometry& g = *in.geometry;
  const Index size = in.size;
  const double R = g.radius;
  const double line_width = std::max(1.6, static_cast<double>(size) / 20.0);
  Eigen::MatrixXd out = in.pixels;

  auto for_face = [&](auto&& shade) {
    for (Index y = 0; y < size; ++y)
      for (Index x = 0; x < size; ++x) {
        const Index j = y * size + x;
        if (mask(j) == 0.0) continue;
        shade(Point{static_cast<double>(x), static_cast<double>(y)}, out.col(j));
      }
  };

  switch (kind) {
    case DefectKind::Scratch: {
      const Point start = random_face_point(rng, g);
      const double heading = util::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const int segments = 3 + static_cast<int>(util::uniform_index(rng, 2));
      const std::vector<std::vector<Point>> lines{walk(rng, start, heading, segments, 0.12 * R, 0.2 * R, 0.4)};
      const bool bright = util::uniform01(rng) < 0.5;
      const double target = bright ? 1.0 : 0.02;
      const double strength = util::uniform(rng, 0.85, 1.0);
      for_face([&](Point p, auto px) {
        if (polyline_distance(p, lines) <= line_width / 2.0) px.array() += strength * (target - px.array());
      });
      break;
    }
    case DefectKind::Dent: {
      const Point c = random_face_point(rng, g);
      const double area = util::uniform(rng, 0.11, 0.17) * 2.27 * R * R;
      const double aspect = util::uniform(rng, 0.6, 1.0);
      const double a = std::sqrt(area / (std::numbers::pi * aspect)), b = a * aspect;
      const double phi = util::uniform(rng, 0.0, std::numbers::pi);
      const double depth = util::uniform(rng, 0.75, 0.9);
      const double cp = std::cos(phi), sp = std::sin(phi);
      for_face([&](Point p, auto px) {
        const double dx = p.x - c.x, dy = p.y - c.y;
        const double u = (dx * cp + dy * sp) / a, v = (-dx * sp + dy * cp) / b;
        const double d2 = u * u + v * v;
        if (d2 < 1.0) px *= 1.0 - depth * (1.0 - 0.5 * d2);
      });
      break;
    }
    case DefectKind::Crack: {
      const Point start = random_face_point(rng, g);
      const double heading = util::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      std::vector<std::vector<Point>> lines{walk(rng, start, heading, 6 + static_cast<int>(util::uniform_index(rng, 5)),
                                                 0.07 * R, 0.12 * R, 0.9)};
      if (util::uniform01(rng) < 0.5) {
        const Point fork = lines[0][lines[0].size() / 2];
        lines.push_back(walk(rng, fork, heading + util::uniform(rng, 0.6, 1.2), 3, 0.06 * R, 0.1 * R, 0.9));
      }
      const double darkness = util::uniform(rng, 0.05, 0.15);
      for_face([&](Point p, auto px) {
        if (polyline_distance(p, lines) <= line_width * 0.6) px *= darkness;
      });
      break;
    }
    case DefectKind::Wrinkle: {
      const Point c = random_face_point(rng, g);
      const double heading = util::uniform(rng, 0.0, std::numbers::pi);
      const double wavelength = util::uniform(rng, 0.22, 0.35) * R;
      const double reach = util::uniform(rng, 0.45, 0.7) * R;
      const double amplitude = util::uniform(rng, 0.55, 0.7);
      const double phase = util::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double hx = std::cos(heading), hy = std::sin(heading);
      for_face([&](Point p, auto px) {
        const double dx = p.x - c.x, dy = p.y - c.y;
        const double r2 = (dx * dx + dy * dy) / (reach * reach);
        if (r2 >= 1.0) return;
        const double window = (1.0 - r2) * (1.0 - r2);
        const double ridge = std::sin(2.0 * std::numbers::pi * (dx * hx + dy * hy) / wavelength + phase);
        px *= 1.0 + amplitude * window * (ridge - 0.35);
      });
      break;
    }
  }
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

struct Band {
  double lo, hi;  // affected fraction of face pixels, in (lo, hi]
};

Band band(DefectKind kind) {
  switch (kind) {
    case DefectKind::Scratch: return {0.015, 0.045};
    case DefectKind::Dent: return {0.07, 0.19};
    case DefectKind::Crack: return {0.03, 0.12};
    case DefectKind::Wrinkle: return {0.08, 1.0};
  }
  return {0.0, 1.0};
}

}  // namespace

ImageSample apply_defect(const ImageSample& sample, DefectKind kind, std::uint64_t seed) {
  if (sample.label != Label::NonDefective) throw SynthError("apply_defect: sample is already defective");
  if (!sample.geometry) throw SynthError("apply_defect: sample has no face geometry");
  const Eigen::ArrayXd mask = face_mask(*sample.geometry, sample.size);
  const double face = mask.sum();
  const Band accept = band(kind);
  util::Rng rng(seed);

  Eigen::MatrixXd rendered;
  for (int attempt = 0; attempt < 64; ++attempt) {
    rendered = render(sample, mask, kind, rng);
    const Eigen::ArrayXd change = (rendered - sample.pixels).cwiseAbs().colwise().maxCoeff().transpose().array();
    const double affected = ((change > 0.01).cast<double>() * mask).sum();
    const double fraction = face > 0 ? affected / face : 0.0;
    if (affected > 0 && fraction > accept.lo && fraction <= accept.hi) break;
  }

  ImageSample out = sample;
  out.pixels = std::move(rendered);
  out.label = Label::Defective;
  out.provenance.defect = kind;
  out.provenance.defect_seed = seed;
  return out;
}

}  // namespace taguchi::synth
