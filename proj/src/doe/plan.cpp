#include "taguchi/doe/plan.hpp"

#include "taguchi/util/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace taguchi::doe {

int Factor::level_index(std::string_view label) const {
  const auto it = std::find(levels.begin(), levels.end(), label);
  return it == levels.end() ? -1 : static_cast<int>(it - levels.begin());
}

void validate_factors(const std::vector<Factor>& factors) {
  std::set<std::string> names;
  for (const auto& f : factors) {
    if (f.name.empty()) throw DesignError("factor with empty name");
    if (!names.insert(f.name).second) throw DesignError("duplicate factor name '" + f.name + "'");
    if (f.levels.size() < 2) throw DesignError("factor '" + f.name + "' needs at least 2 levels");
    std::set<std::string> labels(f.levels.begin(), f.levels.end());
    if (labels.size() != f.levels.size()) throw DesignError("factor '" + f.name + "' has duplicate level labels");
  }
}

std::vector<Factor> cnn_study_factors() {
  return {
      {"layers", {"6", "8", "10", "12"}},
      {"image_size", {"[100x100]", "[200x200]"}},
      {"optimizer", {"adam", "sgd"}},
      {"loss", {"Hinge", "Sqd. Hinge"}},
      {"activation", {"ReLU", "ReLU6"}},
      {"filter_size", {"[2x2]", "[3x3]"}},
  };
}

const std::string& TrialConfig::level(std::string_view factor) const {
  for (const auto& [name, label] : settings)
    if (name == factor) return label;
  throw std::out_of_range("trial " + std::to_string(run_index) + " has no factor '" + std::string(factor) + "'");
}

bool TrialConfig::has(std::string_view factor) const {
  return std::any_of(settings.begin(), settings.end(), [&](const auto& s) { return s.first == factor; });
}

Index ExperimentPlan::column_for(std::string_view factor) const {
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i].name == factor) return assignment[i];
  throw std::out_of_range("plan has no factor '" + std::string(factor) + "'");
}

namespace {

std::vector<TrialConfig> materialize(const OrthogonalArray& array, const std::vector<Factor>& factors,
                                     const std::vector<Index>& assignment) {
  std::vector<TrialConfig> trials;
  trials.reserve(static_cast<std::size_t>(array.rows()));
  for (Index r = 0; r < array.rows(); ++r) {
    TrialConfig trial;
    trial.run_index = static_cast<int>(r) + 1;
    for (std::size_t f = 0; f < factors.size(); ++f)
      trial.settings.emplace_back(factors[f].name,
                                  factors[f].levels[static_cast<std::size_t>(array(r, assignment[f]))]);
    trials.push_back(std::move(trial));
  }
  return trials;
}

}  // namespace

ExperimentPlan assign_factors(const OrthogonalArray& array, const std::vector<Factor>& factors) {
  validate_factors(factors);
  std::vector<bool> used(static_cast<std::size_t>(array.cols()), false);
  std::vector<Index> assignment;
  for (const auto& factor : factors) {
    Index chosen = -1;
    for (Index c = 0; c < array.cols(); ++c) {
      if (!used[static_cast<std::size_t>(c)] && array.levels(c) == factor.level_count()) {
        chosen = c;
        break;
      }
    }
    if (chosen < 0)
      throw DesignError("no unassigned " + std::to_string(factor.level_count()) + "-level column for factor '" +
                        factor.name + "'");
    used[static_cast<std::size_t>(chosen)] = true;
    assignment.push_back(chosen);
  }
  ExperimentPlan plan{array, factors, assignment, {}};
  plan.trials = materialize(array, factors, assignment);
  return plan;
}

ExperimentPlan load_plan_fixture(std::istream& in, const std::vector<Factor>& factors, int expected_rows) {
  validate_factors(factors);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<std::vector<int>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split_csv(line);
    if (!have_header) {
      if (fields.size() != factors.size() + 1 || fields[0] != "run")
        throw ParseError("plan header must be run followed by " + std::to_string(factors.size()) + " factor columns",
                         line_no);
      for (std::size_t f = 0; f < factors.size(); ++f)
        if (fields[f + 1] != std::string(1, static_cast<char>('A' + f)))
          throw ParseError("plan header column " + std::to_string(f + 2) + " must be '" +
                               std::string(1, static_cast<char>('A' + f)) + "'",
                           line_no);
      have_header = true;
      continue;
    }
    if (fields.size() != factors.size() + 1)
      throw ParseError("expected " + std::to_string(factors.size() + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    long long run = 0;
    if (!util::parse_int(fields[0], run) || run != static_cast<long long>(rows.size()) + 1)
      throw ParseError("run number '" + fields[0] + "' out of sequence", line_no);
    std::vector<int> levels;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const int idx = factors[f].level_index(fields[f + 1]);
      if (idx < 0)
        throw ParseError("unknown level '" + fields[f + 1] + "' for factor '" + factors[f].name + "'", line_no);
      levels.push_back(idx);
    }
    rows.push_back(std::move(levels));
  }
  if (!have_header) throw ParseError("empty plan", line_no);
  if (static_cast<int>(rows.size()) != expected_rows)
    throw ParseError("plan has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(expected_rows),
                     line_no);

  Eigen::MatrixXi cells(static_cast<Index>(rows.size()), static_cast<Index>(factors.size()));
  std::vector<int> level_counts;
  for (const auto& f : factors) level_counts.push_back(f.level_count());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t f = 0; f < factors.size(); ++f)
      cells(static_cast<Index>(r), static_cast<Index>(f)) = rows[r][f];

  std::vector<Index> assignment(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) assignment[f] = static_cast<Index>(f);
  OrthogonalArray array(std::move(cells), std::move(level_counts));
  ExperimentPlan plan{array, factors, assignment, {}};
  plan.trials = materialize(plan.array, factors, assignment);
  return plan;
}

void write_plan(std::ostream& out, const ExperimentPlan& plan) {
  out << "run";
  for (std::size_t f = 0; f < plan.factors.size(); ++f) out << ',' << static_cast<char>('A' + f);
  out << '\n';
  for (const auto& trial : plan.trials) {
    out << trial.run_index;
    for (const auto& setting : trial.settings) out << ',' << setting.second;
    out << '\n';
  }
}

std::uint64_t full_factorial_size(const std::vector<Factor>& factors) {
  if (factors.empty()) throw DesignError("full factorial of an empty factor list");
  std::uint64_t size = 1;
  for (const auto& f : factors) size *= static_cast<std::uint64_t>(f.levels.size());
  return size;
}

}  // namespace taguchi::doe
