#include "roadflow/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

/// Kuhn-Munkres with potentials on an n x m matrix, n <= m. Returns for each
/// row the assigned column. O(n^2 m).
std::vector<int> solve_rows(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] > 0) {
      row_to_col[p[j] - 1] = j - 1;
    }
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian_assign(const Eigen::MatrixXd& cost, double gate) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());

  Assignment result;
  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
    return result;
  }
  if (!cost.allFinite()) {
    throw NumericError("hungarian_assign: cost matrix contains non-finite entries");
  }

  // Forbidden entries become one shared large cost. Making it bigger than any
  // achievable allowed total lets the solver first maximize the number of
  // allowed pairs, then minimize cost among those.
  double max_abs = 1.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (cost(i, j) <= gate) {
        max_abs = std::max(max_abs, std::abs(cost(i, j)));
      }
    }
  }
  const double forbidden = (max_abs + 1.0) * (rows + cols + 1);
  // Sub-resolution perturbation so cost ties resolve toward smaller
  // (row, col) indices deterministically.
  const double tie_eps =
      max_abs * 1e-12 / (static_cast<double>(rows) * cols + 1.0);

  const bool transposed = rows > cols;
  const int n = transposed ? cols : rows;
  const int m = transposed ? rows : cols;

  Eigen::MatrixXd work(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const int r = transposed ? j : i;
      const int c = transposed ? i : j;
      const double raw = cost(r, c);
      work(i, j) = (raw > gate ? forbidden : raw) +
                   tie_eps * (static_cast<double>(r) * cols + c);
    }
  }

  const std::vector<int> row_to_col = solve_rows(work);

  std::vector<char> row_matched(rows, false), col_matched(cols, false);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[i];
    if (j < 0) {
      continue;
    }
    const int r = transposed ? j : i;
    const int c = transposed ? i : j;
    if (cost(r, c) > gate) {
      continue;  // solver was forced through a forbidden cell; drop the pair
    }
    result.pairs.emplace_back(r, c);
    result.total_cost += cost(r, c);
    row_matched[r] = true;
    col_matched[c] = true;
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  for (int i = 0; i < rows; ++i) {
    if (!row_matched[i]) result.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_matched[j]) result.unmatched_cols.push_back(j);
  }
  return result;
}

}  // namespace roadflow
