#include "taguchi/doe/orthogonal_array.hpp"

#include <bit>
#include <sstream>

namespace taguchi::doe {

OrthogonalArray::OrthogonalArray(Eigen::MatrixXi cells, std::vector<int> levels_per_column)
    : cells_(std::move(cells)), levels_(std::move(levels_per_column)) {
  if (static_cast<Index>(levels_.size()) != cells_.cols())
    throw DesignError("orthogonal array: " + std::to_string(levels_.size()) + " level counts for " +
                      std::to_string(cells_.cols()) + " columns");
  for (Index c = 0; c < cells_.cols(); ++c) {
    const int q = levels(c);
    if (q < 2) throw DesignError("orthogonal array: column " + std::to_string(c) + " has fewer than 2 levels");
    for (Index r = 0; r < cells_.rows(); ++r) {
      if (cells_(r, c) < 0 || cells_(r, c) >= q)
        throw DesignError("orthogonal array: cell (" + std::to_string(r) + ", " + std::to_string(c) +
                          ") outside [0, " + std::to_string(q) + ")");
    }
  }
}

OrthogonalArray OrthogonalArray::with_cell(Index run, Index column, int level) const {
  Eigen::MatrixXi cells = cells_;
  cells(run, column) = level;
  return OrthogonalArray(std::move(cells), levels_);
}

namespace {

// Two-level saturated array with 2^k runs and 2^k - 1 columns in Taguchi order.
// Column c (1-based) is the XOR of the basic columns named by the set bits of c;
// basic column 2^j follows run bit (k-1-j), so column 1 changes slowest.
Eigen::MatrixXi two_level_cells(int k) {
  const int runs = 1 << k;
  Eigen::MatrixXi cells(runs, runs - 1);
  for (int r = 0; r < runs; ++r) {
    for (int c = 1; c < runs; ++c) {
      int mask = 0;
      for (int j = 0; j < k; ++j)
        if (c & (1 << j)) mask |= 1 << (k - 1 - j);
      cells(r, c - 1) = std::popcount(static_cast<unsigned>(r & mask)) & 1;
    }
  }
  return cells;
}

OrthogonalArray two_level(int k) {
  Eigen::MatrixXi cells = two_level_cells(k);
  std::vector<int> levels(static_cast<std::size_t>(cells.cols()), 2);
  return OrthogonalArray(std::move(cells), std::move(levels));
}

// Columns 1 and 2 of L16(2^15) plus their interaction column 3 collapse into one
// four-level column: (0,0) -> 0, (0,1) -> 1, (1,0) -> 2, (1,1) -> 3.
OrthogonalArray l16_mixed() {
  const Eigen::MatrixXi base = two_level_cells(4);
  Eigen::MatrixXi cells(16, 13);
  cells.col(0) = 2 * base.col(0) + base.col(1);
  cells.rightCols(12) = base.rightCols(12);
  std::vector<int> levels(13, 2);
  levels[0] = 4;
  return OrthogonalArray(std::move(cells), std::move(levels));
}

}  // namespace

OrthogonalArray build_standard_array(std::string_view name) {
  if (name == "L4(2^3)" || name == "L4") return two_level(2);
  if (name == "L8(2^7)" || name == "L8") return two_level(3);
  if (name == "L16(2^15)" || name == "L16") return two_level(4);
  if (name == "L16_mixed(4^1·2^12)" || name == "L16_mixed(4^1.2^12)" || name == "L16_mixed") return l16_mixed();
  throw DesignError("unsupported design '" + std::string(name) + "'");
}

std::vector<std::string> standard_array_names() {
  return {"L4(2^3)", "L8(2^7)", "L16(2^15)", "L16_mixed(4^1·2^12)"};
}

OrthogonalityReport verify_orthogonality(const OrthogonalArray& array) {
  OrthogonalityReport report;
  const Index runs = array.rows();
  const Index cols = array.cols();

  for (Index c = 0; c < cols; ++c) {
    const int q = array.levels(c);
    if (runs % q != 0) {
      report.divisibility.push_back({c, -1, q});
      continue;
    }
    std::vector<Index> counts(static_cast<std::size_t>(q), 0);
    for (Index r = 0; r < runs; ++r) ++counts[static_cast<std::size_t>(array(r, c))];
    for (int level = 0; level < q; ++level)
      if (counts[static_cast<std::size_t>(level)] != runs / q)
        report.balance.push_back({c, level, counts[static_cast<std::size_t>(level)], runs / q});
  }

  for (Index a = 0; a < cols; ++a) {
    for (Index b = a + 1; b < cols; ++b) {
      const int qa = array.levels(a);
      const int qb = array.levels(b);
      if (runs % (qa * qb) != 0) {
        report.divisibility.push_back({a, b, qa * qb});
        continue;
      }
      Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(qa, qb);
      for (Index r = 0; r < runs; ++r) ++counts(array(r, a), array(r, b));
      const Index expected = runs / (qa * qb);
      for (int la = 0; la < qa; ++la)
        for (int lb = 0; lb < qb; ++lb)
          if (counts(la, lb) != expected) report.pairs.push_back({a, b, la, lb, counts(la, lb), expected});
    }
  }

  report.pass = report.violation_count() == 0;
  return report;
}

std::string describe(const OrthogonalityReport& report) {
  std::ostringstream out;
  out << (report.pass ? "pass" : "fail") << " (" << report.violation_count() << " violations)\n";
  for (const auto& v : report.divisibility) {
    if (v.column_b < 0)
      out << "  column " << v.column_a << ": run count not divisible by " << v.divisor << '\n';
    else
      out << "  columns " << v.column_a << "," << v.column_b << ": run count not divisible by " << v.divisor
          << '\n';
  }
  for (const auto& v : report.balance)
    out << "  column " << v.column << " level " << v.level << ": " << v.count << " runs, expected "
        << v.expected << '\n';
  for (const auto& v : report.pairs)
    out << "  columns " << v.column_a << "," << v.column_b << " levels (" << v.level_a << "," << v.level_b
        << "): " << v.count << " runs, expected " << v.expected << '\n';
  return out.str();
}

}  // namespace taguchi::doe
