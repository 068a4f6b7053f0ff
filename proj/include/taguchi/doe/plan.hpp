#pragma once

#include "taguchi/doe/orthogonal_array.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace taguchi::doe {

struct Factor {
  std::string name;
  std::vector<std::string> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
  /// -1 when the label is not a level of this factor.
  int level_index(std::string_view label) const;
};

/// Throws DesignError on < 2 levels, duplicate level labels, or duplicate factor names.
void validate_factors(const std::vector<Factor>& factors);

/// The six factors of the CNN study: layers, image_size, optimizer, loss, activation, filter_size.
std::vector<Factor> cnn_study_factors();

struct TrialConfig {
  int run_index = 0;
  std::vector<std::pair<std::string, std::string>> settings;

  /// Throws std::out_of_range for a factor not in the trial.
  const std::string& level(std::string_view factor) const;
  bool has(std::string_view factor) const;
};

struct ExperimentPlan {
  OrthogonalArray array;
  std::vector<Factor> factors;
  std::vector<Index> assignment;  // factors[i] occupies array column assignment[i]
  std::vector<TrialConfig> trials;

  Index column_for(std::string_view factor) const;
  /// Level index of factors[factor] in trials[trial].
  int level_index(std::size_t trial, std::size_t factor) const {
    return array(static_cast<Index>(trial), assignment[factor]);
  }
};

/// Factors go, in declaration order, to the lowest-index unassigned column with the
/// same level count. Throws DesignError naming the first factor that does not fit.
ExperimentPlan assign_factors(const OrthogonalArray& array, const std::vector<Factor>& factors);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads `run,A,B,...` comma-separated plan text: one letter column per factor, in order.
/// Throws ParseError (with the 1-based line number) on malformed rows, unknown level
/// labels, or a row count other than expected_rows.
ExperimentPlan load_plan_fixture(std::istream& in, const std::vector<Factor>& factors = cnn_study_factors(),
                                 int expected_rows = 16);

void write_plan(std::ostream& out, const ExperimentPlan& plan);

/// Product of level counts. Throws DesignError for an empty list.
std::uint64_t full_factorial_size(const std::vector<Factor>& factors);

}  // namespace taguchi::doe
