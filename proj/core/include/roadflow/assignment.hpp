#pragma once

#include <Eigen/Core>
#include <limits>
#include <utility>
#include <vector>

namespace roadflow {

struct Assignment {
  /// Matched (row, col) pairs, sorted by row.
  std::vector<std::pair<int, int>> pairs;
  /// Sum of the original costs over pairs.
  double total_cost = 0.0;
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Minimum-cost one-to-one assignment on a rectangular cost matrix.
/// Entries strictly above `gate` are forbidden: they can never appear in the
/// result, and rows/cols with no allowed partner stay unmatched. Among
/// assignments of maximum allowed cardinality the total cost is minimal;
/// cost ties prefer lexicographically smaller (row, col) pairs.
Assignment hungarian_assign(
    const Eigen::MatrixXd& cost,
    double gate = std::numeric_limits<double>::infinity());

}  // namespace roadflow
