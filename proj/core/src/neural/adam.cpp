#include "roadflow/neural/adam.hpp"

#include <cmath>

#include "roadflow/errors.hpp"

namespace roadflow::neural {

void AdamOptimizer::step(ModelParams& params, const ModelParams& grads) {
  auto param_refs = params.tensors();
  const auto grad_refs = grads.tensors();
  if (param_refs.size() != grad_refs.size()) {
    throw ConfigError("AdamOptimizer: parameter/gradient shape mismatch");
  }
  if (m_.empty()) {
    m_.resize(param_refs.size());
    v_.resize(param_refs.size());
    for (std::size_t i = 0; i < param_refs.size(); ++i) {
      m_[i] = Eigen::VectorXd::Zero(param_refs[i].size());
      v_[i] = Eigen::VectorXd::Zero(param_refs[i].size());
    }
  }

  t_ += 1;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));

  for (std::size_t i = 0; i < param_refs.size(); ++i) {
    TensorRef& ref = param_refs[i];
    if (ref.size() != grad_refs[i].size()) {
      throw ConfigError("AdamOptimizer: tensor '" + ref.name +
                        "' changed shape");
    }
    Eigen::Map<Eigen::VectorXd> p(ref.data, ref.size());
    Eigen::Map<const Eigen::VectorXd> g(grad_refs[i].data, ref.size());

    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] +
            (1.0 - config_.beta2) * g.cwiseProduct(g);
    const Eigen::VectorXd m_hat = m_[i] / bias1;
    const Eigen::VectorXd v_hat = v_[i] / bias2;
    p -= config_.learning_rate *
         (m_hat.array() / (v_hat.array().sqrt() + config_.epsilon)).matrix();
    if (!ref.is_bias && config_.weight_decay > 0.0) {
      p -= config_.learning_rate * config_.weight_decay * p;
    }
  }
}

}  // namespace roadflow::neural
