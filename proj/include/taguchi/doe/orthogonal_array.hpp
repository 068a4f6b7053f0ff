#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taguchi::doe {

using Index = Eigen::Index;

class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run matrix of zero-based level indices: one row per run, one column per factor slot.
class OrthogonalArray {
 public:
  OrthogonalArray() = default;
  /// Throws DesignError when a cell is outside [0, levels) of its column or a column has < 2 levels.
  OrthogonalArray(Eigen::MatrixXi cells, std::vector<int> levels_per_column);

  Index rows() const { return cells_.rows(); }
  Index cols() const { return cells_.cols(); }
  int levels(Index column) const { return levels_[static_cast<std::size_t>(column)]; }
  const std::vector<int>& levels_per_column() const { return levels_; }
  const Eigen::MatrixXi& cells() const { return cells_; }
  int operator()(Index run, Index column) const { return cells_(run, column); }

  /// Copy with a single cell replaced.
  OrthogonalArray with_cell(Index run, Index column, int level) const;

  friend bool operator==(const OrthogonalArray& a, const OrthogonalArray& b) {
    return a.levels_ == b.levels_ && a.cells_.rows() == b.cells_.rows() &&
           a.cells_.cols() == b.cells_.cols() && a.cells_ == b.cells_;
  }

 private:
  Eigen::MatrixXi cells_;
  std::vector<int> levels_;
};

/// Canonical names: "L4(2^3)", "L8(2^7)", "L16(2^15)", "L16_mixed(4^1·2^12)".
/// The short forms "L4", "L8", "L16", "L16_mixed" are accepted too.
OrthogonalArray build_standard_array(std::string_view name);
std::vector<std::string> standard_array_names();

struct BalanceViolation {
  Index column;
  int level;
  Index count;
  Index expected;
};

struct PairViolation {
  Index column_a;
  Index column_b;
  int level_a;
  int level_b;
  Index count;
  Index expected;
};

/// Run count not divisible by a column's level count (column_b < 0) or a pair's product.
struct DivisibilityViolation {
  Index column_a;
  Index column_b;
  Index divisor;
};

struct OrthogonalityReport {
  bool pass = true;
  std::vector<DivisibilityViolation> divisibility;
  std::vector<BalanceViolation> balance;
  std::vector<PairViolation> pairs;

  std::size_t violation_count() const { return divisibility.size() + balance.size() + pairs.size(); }
};

/// Exact balance and pairwise-orthogonality counting. Never throws.
OrthogonalityReport verify_orthogonality(const OrthogonalArray& array);

std::string describe(const OrthogonalityReport& report);

}  // namespace taguchi::doe
