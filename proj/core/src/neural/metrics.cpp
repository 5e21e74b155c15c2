#include "roadflow/neural/metrics.hpp"

#include <cmath>

#include "roadflow/errors.hpp"

namespace roadflow::neural {

ClassificationMetrics classification_metrics(
    const std::vector<double>& predictions, const std::vector<int>& labels,
    double threshold) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw DataError("classification_metrics: predictions and labels must be "
                    "non-empty and aligned");
  }

  ClassificationMetrics m;
  double sq = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int predicted = predictions[i] >= threshold ? 1 : 0;
    const int actual = labels[i] != 0 ? 1 : 0;
    m.tp += predicted == 1 && actual == 1;
    m.fp += predicted == 1 && actual == 0;
    m.fn += predicted == 0 && actual == 1;
    m.tn += predicted == 0 && actual == 0;
    sq += (predictions[i] - actual) * (predictions[i] - actual);
  }
  if (m.tp + m.fn == 0) {
    throw DataError("classification_metrics: no positive labels, recall "
                    "undefined");
  }

  const double n = static_cast<double>(predictions.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / n;
  m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.precision = m.tp + m.fp == 0
                    ? 0.0
                    : static_cast<double>(m.tp) /
                          static_cast<double>(m.tp + m.fp);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.rmse = std::sqrt(sq / n);
  return m;
}

}  // namespace roadflow::neural
