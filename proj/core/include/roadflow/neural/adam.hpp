#pragma once

#include <Eigen/Core>
#include <vector>

#include "roadflow/neural/model.hpp"

namespace roadflow::neural {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Decoupled weight decay; applied to weights only, never to biases.
  double weight_decay = 1e-5;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config = {}) : config_(config) {}

  /// Applies one update in place. Moments are lazily shaped on first use.
  void step(ModelParams& params, const ModelParams& grads);

  long steps_taken() const { return t_; }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<Eigen::VectorXd> m_;
  std::vector<Eigen::VectorXd> v_;
};

}  // namespace roadflow::neural
