#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "roadflow/assignment.hpp"
#include "roadflow/rng.hpp"

using namespace roadflow;

namespace {

/// Exhaustive oracle: maximize the number of allowed pairs, then minimize the
/// total cost, over every injective row->column mapping.
struct BruteForceResult {
  int matched = -1;
  double total = 0.0;
};

BruteForceResult brute_force(const Eigen::MatrixXd& cost, double gate) {
  // Permute the larger side so every injective row->column map is visited.
  if (cost.rows() > cost.cols()) {
    return brute_force(cost.transpose(), gate);
  }
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<int> cols(static_cast<std::size_t>(m));
  std::iota(cols.begin(), cols.end(), 0);

  BruteForceResult best;
  do {
    int matched = 0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = cost(i, cols[static_cast<std::size_t>(i)]);
      if (c <= gate) {
        matched += 1;
        total += c;
      }
    }
    if (matched > best.matched ||
        (matched == best.matched && total < best.total)) {
      best.matched = matched;
      best.total = total;
    }
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

}  // namespace

TEST_CASE("single entry within gate") {
  Eigen::MatrixXd cost(1, 1);
  cost << 1.0;
  const Assignment a = hungarian_assign(cost, 10.0);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
  CHECK(a.total_cost == 1.0);
}

TEST_CASE("two-by-two picks the diagonal") {
  Eigen::MatrixXd cost(2, 2);
  cost << 1, 2, 2, 1;
  const Assignment a = hungarian_assign(cost);
  REQUIRE(a.pairs.size() == 2);
  CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
  CHECK(a.pairs[1] == std::pair<int, int>{1, 1});
  CHECK(a.total_cost == 2.0);
}

TEST_CASE("matches brute force on random integer matrices") {
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    const int m = static_cast<int>(rng.uniform_int(1, 5));
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        cost(i, j) = static_cast<double>(rng.uniform_int(0, 100));
      }
    }
    const Assignment a = hungarian_assign(cost);
    const BruteForceResult oracle =
        brute_force(cost, std::numeric_limits<double>::infinity());
    CHECK(static_cast<int>(a.pairs.size()) == oracle.matched);
    CHECK(a.total_cost == oracle.total);  // exact on integer costs
  }
}

TEST_CASE("matches brute force with a gate") {
  Rng rng(777);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    const int m = static_cast<int>(rng.uniform_int(1, 5));
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        cost(i, j) = static_cast<double>(rng.uniform_int(0, 100));
      }
    }
    const double gate = 60.0;
    const Assignment a = hungarian_assign(cost, gate);
    for (const auto& [i, j] : a.pairs) {
      CHECK(cost(i, j) <= gate);  // forbidden pairs never returned
    }
    const BruteForceResult oracle = brute_force(cost, gate);
    CHECK(static_cast<int>(a.pairs.size()) == oracle.matched);
    CHECK(a.total_cost == oracle.total);
  }
}

TEST_CASE("unassignable rows and columns stay unmatched") {
  Eigen::MatrixXd cost(2, 2);
  cost << 1, 100, 100, 100;
  const Assignment a = hungarian_assign(cost, 50.0);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
  CHECK(a.unmatched_rows == std::vector<int>{1});
  CHECK(a.unmatched_cols == std::vector<int>{1});
}

TEST_CASE("rectangular matrices leave extras unmatched") {
  Eigen::MatrixXd cost(2, 4);
  cost << 5, 1, 9, 9, 9, 9, 2, 9;
  const Assignment a = hungarian_assign(cost);
  REQUIRE(a.pairs.size() == 2);
  CHECK(a.total_cost == 3.0);
  CHECK(a.unmatched_cols.size() == 2);
}

TEST_CASE("empty matrix") {
  const Assignment a = hungarian_assign(Eigen::MatrixXd(0, 0));
  CHECK(a.pairs.empty());
}
