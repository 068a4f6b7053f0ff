#include "taguchi/analysis/report.hpp"

#include "taguchi/util/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace taguchi::analysis {

namespace fs = std::filesystem;
using util::format_double;
using util::format_fixed;

std::string render_main_effects_csv(const MainEffectsTable& effects) {
  std::ostringstream out;
  out << "factor,level,mean,count,delta,rank\n";
  for (const auto& f : effects.per_factor)
    for (const auto& l : f.levels)
      out << f.factor << ',' << l.label << ',' << format_double(l.mean) << ',' << l.count << ','
          << format_double(f.delta) << ',' << f.rank << '\n';
  return out.str();
}

std::string render_intervals_csv(const std::vector<IntervalSummary>& intervals) {
  std::ostringstream out;
  out << "metric,n,mean,stddev,half_width,lower,upper\n";
  for (const auto& s : intervals)
    out << s.metric << ',' << s.count << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ','
        << format_double(s.half_width) << ',' << format_double(s.lower()) << ',' << format_double(s.upper()) << '\n';
  return out.str();
}

namespace {

std::string render_sn_csv(const SnTable& sn) {
  std::ostringstream out;
  out << "factor,level,mean_sn_db,count,delta,rank\n";
  for (const auto& f : sn.per_factor)
    for (const auto& l : f.levels)
      out << f.factor << ',' << l.label << ',' << format_double(l.mean) << ',' << l.count << ','
          << format_double(f.delta) << ',' << f.rank << '\n';
  return out.str();
}

std::string render_optimum_csv(const PredictedOptimum& optimum) {
  std::ostringstream out;
  out << "# metric=" << metric_name(optimum.metric) << " objective=" << objective_name(optimum.objective) << '\n';
  out << "factor,level\n";
  for (const auto& [factor, level] : optimum.levels) out << factor << ',' << level << '\n';
  out << "grand_mean," << format_double(optimum.grand_mean) << '\n';
  out << "predicted," << format_double(optimum.predicted) << '\n';
  return out.str();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
  double map(double v, double top, double bottom) const {
    if (hi <= lo) return (top + bottom) / 2;
    return bottom - (v - lo) / (hi - lo) * (bottom - top);
  }
};

Range padded(double lo, double hi) {
  const double pad = hi > lo ? 0.08 * (hi - lo) : std::max(1e-3, 0.05 * std::abs(hi));
  return {lo - pad, hi + pad};
}

std::string px(double v) { return format_fixed(v, 2); }

}  // namespace

std::string render_main_effects_svg(const MainEffectsTable& effects) {
  const double panel_w = 170, top = 50, bottom = 290, left_margin = 70;
  const double width = left_margin + panel_w * static_cast<double>(std::max<std::size_t>(1, effects.per_factor.size())) + 20;
  const double height = 340;

  double lo = effects.grand_mean, hi = effects.grand_mean;
  for (const auto& f : effects.per_factor)
    for (const auto& l : f.levels) {
      lo = std::min(lo, l.mean);
      hi = std::max(hi, l.mean);
    }
  const Range y = padded(lo, hi);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << px(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Main effects plot for means: "
      << metric_name(effects.metric) << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y.lo + (y.hi - y.lo) * t / 4.0;
    const double yy = y.map(v, top, bottom);
    svg << "<text x=\"" << px(left_margin - 6) << "\" y=\"" << px(yy + 4) << "\" text-anchor=\"end\">"
        << format_fixed(v, 3) << "</text>\n";
  }
  const double gy = y.map(effects.grand_mean, top, bottom);
  for (std::size_t f = 0; f < effects.per_factor.size(); ++f) {
    const auto& factor = effects.per_factor[f];
    const double x0 = left_margin + panel_w * static_cast<double>(f);
    svg << "<rect x=\"" << px(x0) << "\" y=\"" << px(top) << "\" width=\"" << px(panel_w) << "\" height=\""
        << px(bottom - top) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << px(x0 + panel_w / 2) << "\" y=\"" << px(top - 6) << "\" text-anchor=\"middle\">"
        << xml_escape(factor.factor) << " (rank " << factor.rank << ")</text>\n";
    svg << "<line x1=\"" << px(x0) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(x0 + panel_w) << "\" y2=\"" << px(gy)
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    const auto n = factor.levels.size();
    std::ostringstream points;
    for (std::size_t l = 0; l < n; ++l) {
      const double x = x0 + panel_w * (static_cast<double>(l) + 0.5) / static_cast<double>(n);
      const double yy = y.map(factor.levels[l].mean, top, bottom);
      points << (l ? " " : "") << px(x) << ',' << px(yy);
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << px(yy) << "\" r=\"3.5\" fill=\"#1f4e9c\"/>\n";
      svg << "<text x=\"" << px(x) << "\" y=\"" << px(bottom + 16) << "\" text-anchor=\"middle\">"
          << xml_escape(factor.levels[l].label) << "</text>\n";
    }
    svg << "<polyline points=\"" << points.str() << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_interval_svg(const std::vector<IntervalSummary>& intervals) {
  const double slot = 120, top = 50, bottom = 280, left_margin = 70;
  const double width = left_margin + slot * static_cast<double>(std::max<std::size_t>(1, intervals.size())) + 20;
  const double height = 320;
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& s : intervals) {
    lo = first ? s.lower() : std::min(lo, s.lower());
    hi = first ? s.upper() : std::max(hi, s.upper());
    first = false;
  }
  const Range y = padded(lo, hi);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << px(width / 2)
      << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Interval plot: 95% CI for the mean</text>\n";
  svg << "<rect x=\"" << px(left_margin) << "\" y=\"" << px(top) << "\" width=\""
      << px(slot * static_cast<double>(intervals.size())) << "\" height=\"" << px(bottom - top)
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y.lo + (y.hi - y.lo) * t / 4.0;
    svg << "<text x=\"" << px(left_margin - 6) << "\" y=\"" << px(y.map(v, top, bottom) + 4)
        << "\" text-anchor=\"end\">" << format_fixed(v, 3) << "</text>\n";
  }
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& s = intervals[i];
    const double x = left_margin + slot * (static_cast<double>(i) + 0.5);
    const double ylo = y.map(s.lower(), top, bottom), yhi = y.map(s.upper(), top, bottom);
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(ylo) << "\" x2=\"" << px(x) << "\" y2=\"" << px(yhi)
        << "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    for (double yy : {ylo, yhi})
      svg << "<line x1=\"" << px(x - 8) << "\" y1=\"" << px(yy) << "\" x2=\"" << px(x + 8) << "\" y2=\"" << px(yy)
          << "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    svg << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y.map(s.mean, top, bottom))
        << "\" r=\"4\" fill=\"#c0392b\"/>\n";
    svg << "<text x=\"" << px(x) << "\" y=\"" << px(bottom + 16) << "\" text-anchor=\"middle\">"
        << xml_escape(s.metric) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out.flush()) throw ReportError("failed writing '" + path.string() + "'");
}

}  // namespace

ReportBundle emit_report(const ReportArtifacts& artifacts, const fs::path& directory) {
  ReportBundle bundle;
  if (artifacts.empty()) return bundle;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) throw ReportError("cannot create report directory '" + directory.string() + "'");

  for (const auto& effects : artifacts.effects) {
    const std::string stem = "main_effects_" + std::string(metric_name(effects.metric));
    bundle.tables.push_back(directory / (stem + ".csv"));
    write_file(bundle.tables.back(), render_main_effects_csv(effects));
    bundle.plots.push_back(directory / (stem + ".svg"));
    write_file(bundle.plots.back(), render_main_effects_svg(effects));
  }
  if (!artifacts.intervals.empty()) {
    bundle.tables.push_back(directory / "intervals.csv");
    write_file(bundle.tables.back(), render_intervals_csv(artifacts.intervals));
    bundle.plots.push_back(directory / "interval_plot.svg");
    write_file(bundle.plots.back(), render_interval_svg(artifacts.intervals));
  }
  if (artifacts.sn) {
    bundle.tables.push_back(directory / ("sn_effects_" + std::string(metric_name(artifacts.sn->metric)) + ".csv"));
    write_file(bundle.tables.back(), render_sn_csv(*artifacts.sn));
  }
  if (artifacts.optimum) {
    bundle.tables.push_back(directory / "predicted_optimum.csv");
    write_file(bundle.tables.back(), render_optimum_csv(*artifacts.optimum));
  }
  return bundle;
}

}  // namespace taguchi::analysis
