#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace taguchi::synth {

using Index = Eigen::Index;

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label { NonDefective, Defective };

/// +1 for defective, -1 for non-defective.
inline double target(Label label) { return label == Label::Defective ? 1.0 : -1.0; }
std::string_view label_name(Label label);
Label parse_label(std::string_view name);

enum class DefectKind { Scratch, Dent, Crack, Wrinkle };

inline constexpr DefectKind kAllDefects[] = {DefectKind::Scratch, DefectKind::Dent, DefectKind::Crack,
                                             DefectKind::Wrinkle};

std::string_view defect_name(DefectKind kind);
/// Throws SynthError for an unknown name.
DefectKind parse_defect(std::string_view name);

/// Hexagonal face in pixel coordinates (pixel centres at integer positions).
struct NutGeometry {
  double center_x = 0;
  double center_y = 0;
  double radius = 0;  // circumradius
  double rotation = 0;
  double hole_radius = 0;

  /// Inside the hexagon and outside the bore.
  bool contains(double x, double y) const;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::optional<DefectKind> defect;
  std::uint64_t defect_seed = 0;
  double brightness = 1.0;
  double scale = 1.0;
};

/// Square RGB image; pixels is (3 x size*size) with column y*size + x, values in [0, 1].
struct ImageSample {
  Index size = 0;
  Eigen::MatrixXd pixels;
  Label label = Label::NonDefective;
  Provenance provenance;
  std::optional<NutGeometry> geometry;  // absent for imported images

  double& at(Index y, Index x, Index channel) { return pixels(channel, y * size + x); }
  double at(Index y, Index x, Index channel) const { return pixels(channel, y * size + x); }
};

/// Per-pixel face mask (1 inside the face, 0 elsewhere) as a (size*size) array.
Eigen::ArrayXd face_mask(const NutGeometry& geometry, Index size);

}  // namespace taguchi::synth
