#include "roadflow/neural/logistic.hpp"

#include <cmath>

#include "roadflow/errors.hpp"

namespace roadflow::neural {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LogisticParams logistic_fit(const std::vector<LogisticSample>& samples,
                            const LogisticFitConfig& cfg) {
  const std::size_t n = samples.size();
  std::size_t positives = 0;
  for (const LogisticSample& s : samples) {
    positives += s.label != 0;
  }
  if (n == 0 || positives == 0 || positives == n) {
    throw DataError("logistic_fit:both classes must be present");
  }

  // Standardize features so one learning rate works for all scales.
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const LogisticSample& s : samples) {
    mean += s.x;
  }
  mean /= static_cast<double>(n);
  Eigen::Vector3d stddev = Eigen::Vector3d::Zero();
  for (const LogisticSample& s : samples) {
    stddev += (s.x - mean).cwiseAbs2();
  }
  stddev = (stddev / static_cast<double>(n)).cwiseSqrt();
  for (int f = 0; f < 3; ++f) {
    if (stddev(f) <= 0.0) {
      stddev(f) = 1.0;  // constant feature: coefficient stays at zero
    }
  }

  double b0 = 0.0;
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    double g0 = 0.0;
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const LogisticSample& s : samples) {
      const Eigen::Vector3d z = (s.x - mean).cwiseQuotient(stddev);
      const double p = sigmoid(b0 + b.dot(z));
      const double resid = static_cast<double>(s.label) - p;
      g0 += resid;
      g += resid * z;
    }
    g0 /= static_cast<double>(n);
    g /= static_cast<double>(n);
    b0 += cfg.learning_rate * g0;
    b += cfg.learning_rate * g;
    if (std::max(std::abs(g0), g.cwiseAbs().maxCoeff()) <
        cfg.gradient_tolerance) {
      break;
    }
  }

  LogisticParams params;
  params.beta = b.cwiseQuotient(stddev);
  params.beta0 = b0 - params.beta.dot(mean);
  return params;
}

double logistic_predict(const LogisticParams& params,
                        const Eigen::Vector3d& x) {
  return sigmoid(params.beta0 + params.beta.dot(x));
}

}  // namespace roadflow::neural
