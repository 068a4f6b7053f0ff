#pragma once

#include "taguchi/analysis/effects.hpp"
#include "taguchi/analysis/interval.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

namespace taguchi::analysis {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportArtifacts {
  std::vector<MainEffectsTable> effects;
  std::vector<IntervalSummary> intervals;
  std::optional<SnTable> sn;
  std::optional<PredictedOptimum> optimum;

  bool empty() const { return effects.empty() && intervals.empty() && !sn && !optimum; }
};

struct ReportBundle {
  std::vector<std::filesystem::path> tables;
  std::vector<std::filesystem::path> plots;
};

/// Writes, for each effects table, main_effects_<metric>.csv and .svg; intervals.csv and
/// interval_plot.svg; sn_effects_<metric>.csv; predicted_optimum.csv. Output bytes depend
/// only on the artifacts. Nothing is written for an empty artifact set.
/// Throws ReportError when the directory cannot be created or a file cannot be written.
ReportBundle emit_report(const ReportArtifacts& artifacts, const std::filesystem::path& directory);

std::string render_main_effects_csv(const MainEffectsTable& effects);
std::string render_intervals_csv(const std::vector<IntervalSummary>& intervals);
std::string render_main_effects_svg(const MainEffectsTable& effects);
std::string render_interval_svg(const std::vector<IntervalSummary>& intervals);

}  // namespace taguchi::analysis
