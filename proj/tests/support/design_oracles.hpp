#pragma once

#include "taguchi/doe/orthogonal_array.hpp"

#include <map>
#include <utility>

namespace taguchi::testing {

// Balance and pairwise counting with std::map, independent of the library.
inline bool oracle_orthogonal(const doe::OrthogonalArray& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    std::map<int, Eigen::Index> counts;
    for (Eigen::Index r = 0; r < n; ++r) ++counts[a(r, c)];
    if (static_cast<int>(counts.size()) != a.levels(c)) return false;
    for (const auto& [level, count] : counts)
      if (count * a.levels(c) != n) return false;
  }
  for (Eigen::Index c1 = 0; c1 < a.cols(); ++c1)
    for (Eigen::Index c2 = c1 + 1; c2 < a.cols(); ++c2) {
      std::map<std::pair<int, int>, Eigen::Index> counts;
      for (Eigen::Index r = 0; r < n; ++r) ++counts[{a(r, c1), a(r, c2)}];
      const Eigen::Index cells = a.levels(c1) * a.levels(c2);
      if (static_cast<Eigen::Index>(counts.size()) != cells) return false;
      for (const auto& [pair, count] : counts)
        if (count * cells != n) return false;
    }
  return true;
}

}  // namespace taguchi::testing
