#pragma once

#include <Eigen/Core>
#include <vector>

namespace roadflow::neural {

/// Intercept plus one coefficient per (flow, density, speed) feature.
struct LogisticParams {
  double beta0 = 0.0;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
};

struct LogisticSample {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  int label = 0;
};

struct LogisticFitConfig {
  int max_iterations = 5000;
  double learning_rate = 0.5;
  double gradient_tolerance = 1e-9;
};

/// Maximum-likelihood fit by full-batch gradient ascent on the
/// log-likelihood. Features are standardized internally for conditioning and
/// the coefficients mapped back, so the returned params apply to raw inputs.
/// Throws DataError unless both classes are present.
LogisticParams logistic_fit(const std::vector<LogisticSample>& samples,
                            const LogisticFitConfig& cfg = {});

double logistic_predict(const LogisticParams& params,
                        const Eigen::Vector3d& x);

}  // namespace roadflow::neural
