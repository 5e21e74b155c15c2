#include "roadflow/neural/model.hpp"

#include <algorithm>
#include <cmath>

#include "roadflow/errors.hpp"

namespace roadflow::neural {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Eigen::MatrixXd uniform_matrix(long rows, long cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

constexpr double kProbClamp = 1e-12;

}  // namespace

const char* to_string(ModelKind kind) {
  return kind == ModelKind::gru ? "gru" : "gru_attention";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "gru") return ModelKind::gru;
  if (name == "gru_attention") return ModelKind::gru_attention;
  throw ConfigError("unknown model kind '" + name + "'");
}

ModelParams ModelParams::init(const ModelConfig& config, Rng& rng) {
  if (config.input_dim < 1 || config.hidden_dim < 1 ||
      (config.kind == ModelKind::gru_attention && config.attention_dim < 1)) {
    throw ConfigError("ModelConfig: dimensions must be positive");
  }
  ModelParams p;
  p.config = config;
  const long h = config.hidden_dim;
  const long in = config.input_dim;

  p.gru.w_r = uniform_matrix(h, h + in, rng);
  p.gru.w_z = uniform_matrix(h, h + in, rng);
  p.gru.w_c = uniform_matrix(h, h + in, rng);
  p.gru.b_r = Eigen::VectorXd::Zero(h);
  p.gru.b_z = Eigen::VectorXd::Zero(h);
  p.gru.b_c = Eigen::VectorXd::Zero(h);

  if (config.kind == ModelKind::gru_attention) {
    const long s = config.attention_dim;
    p.attention.w_h = uniform_matrix(s, h, rng);
    p.attention.w_x = uniform_matrix(s, in, rng);
    p.attention.v = uniform_matrix(s, 1, rng).col(0);
    p.attention.b = Eigen::VectorXd::Zero(s);
  }

  p.head.w = uniform_matrix(h, 1, rng).col(0);
  p.head.bias = 0.0;
  return p;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams p;
  p.config = other.config;
  p.gru.w_r = Eigen::MatrixXd::Zero(other.gru.w_r.rows(), other.gru.w_r.cols());
  p.gru.w_z = Eigen::MatrixXd::Zero(other.gru.w_z.rows(), other.gru.w_z.cols());
  p.gru.w_c = Eigen::MatrixXd::Zero(other.gru.w_c.rows(), other.gru.w_c.cols());
  p.gru.b_r = Eigen::VectorXd::Zero(other.gru.b_r.size());
  p.gru.b_z = Eigen::VectorXd::Zero(other.gru.b_z.size());
  p.gru.b_c = Eigen::VectorXd::Zero(other.gru.b_c.size());
  p.attention.w_h =
      Eigen::MatrixXd::Zero(other.attention.w_h.rows(), other.attention.w_h.cols());
  p.attention.w_x =
      Eigen::MatrixXd::Zero(other.attention.w_x.rows(), other.attention.w_x.cols());
  p.attention.v = Eigen::VectorXd::Zero(other.attention.v.size());
  p.attention.b = Eigen::VectorXd::Zero(other.attention.b.size());
  p.head.w = Eigen::VectorXd::Zero(other.head.w.size());
  p.head.bias = 0.0;
  return p;
}

namespace {

template <typename Params>
std::vector<TensorRef> collect_tensors(Params& p) {
  using D = double;
  std::vector<TensorRef> refs;
  auto add = [&refs](const char* name, auto& tensor, bool is_bias) {
    if (tensor.size() == 0) {
      return;
    }
    refs.push_back({name, const_cast<D*>(tensor.data()), tensor.rows(),
                    tensor.cols(), is_bias});
  };
  add("gru.w_r", p.gru.w_r, false);
  add("gru.w_z", p.gru.w_z, false);
  add("gru.w_c", p.gru.w_c, false);
  add("gru.b_r", p.gru.b_r, true);
  add("gru.b_z", p.gru.b_z, true);
  add("gru.b_c", p.gru.b_c, true);
  add("attention.w_h", p.attention.w_h, false);
  add("attention.w_x", p.attention.w_x, false);
  add("attention.v", p.attention.v, false);
  add("attention.b", p.attention.b, true);
  add("head.w", p.head.w, false);
  refs.push_back({"head.bias", const_cast<D*>(&p.head.bias), 1, 1, true});
  return refs;
}

}  // namespace

std::vector<TensorRef> ModelParams::tensors() { return collect_tensors(*this); }

std::vector<TensorRef> ModelParams::tensors() const {
  return collect_tensors(*this);
}

Eigen::VectorXd gru_cell(const Eigen::VectorXd& h_prev,
                         const Eigen::VectorXd& x, const GruParams& p) {
  const long h = p.w_r.rows();
  const long in = p.w_r.cols() - h;
  if (h_prev.size() != h || x.size() != in) {
    throw ConfigError("gru_cell: input shapes do not match parameters");
  }
  Eigen::VectorXd concat(h + in);
  concat << h_prev, x;
  const Eigen::VectorXd r = sigmoid(p.w_r * concat + p.b_r);
  const Eigen::VectorXd z = sigmoid(p.w_z * concat + p.b_z);
  Eigen::VectorXd gated(h + in);
  gated << r.cwiseProduct(h_prev), x;
  const Eigen::VectorXd candidate = (p.w_c * gated + p.b_c).array().tanh();
  return (1.0 - z.array()) * h_prev.array() + z.array() * candidate.array();
}

Eigen::MatrixXd gru_forward(const Eigen::MatrixXd& sequence,
                            const GruParams& p) {
  if (sequence.rows() < 1) {
    throw DataError("gru_forward: empty sequence");
  }
  const long h = p.w_r.rows();
  Eigen::MatrixXd states(sequence.rows(), h);
  Eigen::VectorXd hidden = Eigen::VectorXd::Zero(h);
  for (long t = 0; t < sequence.rows(); ++t) {
    hidden = gru_cell(hidden, sequence.row(t).transpose(), p);
    states.row(t) = hidden.transpose();
  }
  return states;
}

AttentionResult attention(const Eigen::MatrixXd& hidden_states,
                          const Eigen::MatrixXd& inputs,
                          const AttentionParams& p) {
  const long steps = hidden_states.rows();
  if (steps < 1 || inputs.rows() != steps) {
    throw DataError("attention: hidden states and inputs must align, T >= 1");
  }
  Eigen::VectorXd scores(steps);
  for (long t = 0; t < steps; ++t) {
    const Eigen::VectorXd u = (p.w_h * hidden_states.row(t).transpose() +
                               p.w_x * inputs.row(t).transpose() + p.b)
                                  .array()
                                  .tanh();
    scores(t) = p.v.dot(u);
  }
  const Eigen::VectorXd shifted =
      (scores.array() - scores.maxCoeff()).exp();
  AttentionResult result;
  result.weights = shifted / shifted.sum();
  result.context = hidden_states.transpose() * result.weights;
  return result;
}

double model_forward(const ModelParams& params, const Eigen::MatrixXd& sequence,
                     ForwardCache* cache) {
  const long steps = sequence.rows();
  if (steps < 1) {
    throw DataError("model_forward: empty sequence");
  }
  const long h = params.config.hidden_dim;
  const long in = params.config.input_dim;
  if (sequence.cols() != in) {
    throw ConfigError("model_forward: sequence width != input_dim");
  }

  Eigen::MatrixXd hidden(steps, h), reset(steps, h), update(steps, h),
      candidate(steps, h);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd concat(h + in), gated(h + in);
  for (long t = 0; t < steps; ++t) {
    const Eigen::VectorXd x = sequence.row(t).transpose();
    concat << state, x;
    const Eigen::VectorXd r = sigmoid(params.gru.w_r * concat + params.gru.b_r);
    const Eigen::VectorXd z = sigmoid(params.gru.w_z * concat + params.gru.b_z);
    gated << r.cwiseProduct(state), x;
    const Eigen::VectorXd c =
        (params.gru.w_c * gated + params.gru.b_c).array().tanh();
    state = ((1.0 - z.array()) * state.array() + z.array() * c.array());
    reset.row(t) = r.transpose();
    update.row(t) = z.transpose();
    candidate.row(t) = c.transpose();
    hidden.row(t) = state.transpose();
  }

  Eigen::VectorXd context;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd scores_tanh;
  if (params.config.kind == ModelKind::gru_attention) {
    const long s = params.attention.v.size();
    scores_tanh.resize(steps, s);
    Eigen::VectorXd scores(steps);
    for (long t = 0; t < steps; ++t) {
      const Eigen::VectorXd u =
          (params.attention.w_h * hidden.row(t).transpose() +
           params.attention.w_x * sequence.row(t).transpose() +
           params.attention.b)
              .array()
              .tanh();
      scores_tanh.row(t) = u.transpose();
      scores(t) = params.attention.v.dot(u);
    }
    const Eigen::VectorXd shifted =
        (scores.array() - scores.maxCoeff()).exp();
    alpha = shifted / shifted.sum();
    context = hidden.transpose() * alpha;
  } else {
    context = hidden.row(steps - 1).transpose();
  }

  const double logit = params.head.w.dot(context) + params.head.bias;
  const double prob = sigmoid(logit);

  if (cache != nullptr) {
    cache->inputs = sequence;
    cache->hidden = std::move(hidden);
    cache->reset = std::move(reset);
    cache->update = std::move(update);
    cache->candidate = std::move(candidate);
    cache->scores_tanh = std::move(scores_tanh);
    cache->alpha = std::move(alpha);
    cache->context = std::move(context);
    cache->logit = logit;
    cache->prob = prob;
  }
  return prob;
}

namespace {

/// Accumulates one sample's gradients (scaled by d_logit) into grads.
void backward_sample(const ModelParams& params, const ForwardCache& cache,
                     double d_logit, ModelParams& grads) {
  const long steps = cache.inputs.rows();
  const long h = params.config.hidden_dim;

  grads.head.w += d_logit * cache.context;
  grads.head.bias += d_logit;
  const Eigen::VectorXd d_context = d_logit * params.head.w;

  // dh[t]: gradient flowing into hidden state t from attention/head; the
  // recurrent term is added while walking backwards.
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(steps, h);
  if (params.config.kind == ModelKind::gru_attention) {
    const Eigen::VectorXd d_alpha = cache.hidden * d_context;
    const double inner = cache.alpha.dot(d_alpha);
    const Eigen::VectorXd d_scores =
        cache.alpha.array() * (d_alpha.array() - inner);
    for (long t = 0; t < steps; ++t) {
      dh.row(t) += (cache.alpha(t) * d_context).transpose();
      const Eigen::VectorXd u = cache.scores_tanh.row(t).transpose();
      const Eigen::VectorXd du = d_scores(t) * params.attention.v;
      const Eigen::VectorXd ds = du.array() * (1.0 - u.array().square());
      grads.attention.v += d_scores(t) * u;
      grads.attention.w_h += ds * cache.hidden.row(t);
      grads.attention.w_x += ds * cache.inputs.row(t);
      grads.attention.b += ds;
      dh.row(t) += (params.attention.w_h.transpose() * ds).transpose();
    }
  } else {
    dh.row(steps - 1) += d_context.transpose();
  }

  const long in = params.config.input_dim;
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(h);  // dh flowing to t-1
  for (long t = steps - 1; t >= 0; --t) {
    const Eigen::VectorXd d_hidden = dh.row(t).transpose() + carry;
    const Eigen::VectorXd h_prev =
        t > 0 ? cache.hidden.row(t - 1).transpose()
              : Eigen::VectorXd::Zero(h).eval();
    const Eigen::VectorXd r = cache.reset.row(t).transpose();
    const Eigen::VectorXd z = cache.update.row(t).transpose();
    const Eigen::VectorXd c = cache.candidate.row(t).transpose();
    const Eigen::VectorXd x = cache.inputs.row(t).transpose();

    const Eigen::VectorXd dz = d_hidden.cwiseProduct(c - h_prev);
    const Eigen::VectorXd dc = d_hidden.cwiseProduct(z);
    Eigen::VectorXd d_prev =
        d_hidden.cwiseProduct(Eigen::VectorXd::Ones(h) - z);

    // candidate = tanh(w_c [r o h_prev; x] + b_c)
    const Eigen::VectorXd da_c = dc.array() * (1.0 - c.array().square());
    Eigen::VectorXd gated(h + in);
    gated << r.cwiseProduct(h_prev), x;
    grads.gru.w_c += da_c * gated.transpose();
    grads.gru.b_c += da_c;
    const Eigen::VectorXd d_gated = params.gru.w_c.transpose() * da_c;
    const Eigen::VectorXd dr = d_gated.head(h).cwiseProduct(h_prev);
    d_prev += d_gated.head(h).cwiseProduct(r);

    Eigen::VectorXd concat(h + in);
    concat << h_prev, x;
    const Eigen::VectorXd da_r =
        dr.array() * r.array() * (1.0 - r.array());
    grads.gru.w_r += da_r * concat.transpose();
    grads.gru.b_r += da_r;
    d_prev += (params.gru.w_r.transpose() * da_r).head(h);

    const Eigen::VectorXd da_z =
        dz.array() * z.array() * (1.0 - z.array());
    grads.gru.w_z += da_z * concat.transpose();
    grads.gru.b_z += da_z;
    d_prev += (params.gru.w_z.transpose() * da_z).head(h);

    carry = d_prev;
  }
}

}  // namespace

BatchGradients loss_and_gradients(const ModelParams& params,
                                  const std::vector<WindowedSample>& batch) {
  if (batch.empty()) {
    throw DataError("loss_and_gradients: empty batch");
  }
  BatchGradients out;
  out.grads = ModelParams::zeros_like(params);

  const double scale = 1.0 / static_cast<double>(batch.size());
  ForwardCache cache;
  for (const WindowedSample& sample : batch) {
    const double p = model_forward(params, sample.sequence, &cache);
    const double clamped = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    out.loss += -(sample.label * std::log(clamped) +
                  (1 - sample.label) * std::log(1.0 - clamped)) *
                scale;
    backward_sample(params, cache, (p - sample.label) * scale, out.grads);
  }
  return out;
}

double mean_loss(const ModelParams& params,
                 const std::vector<WindowedSample>& batch) {
  if (batch.empty()) {
    throw DataError("mean_loss: empty batch");
  }
  double loss = 0.0;
  for (const WindowedSample& sample : batch) {
    const double p = model_forward(params, sample.sequence);
    const double clamped = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    loss += -(sample.label * std::log(clamped) +
              (1 - sample.label) * std::log(1.0 - clamped));
  }
  return loss / static_cast<double>(batch.size());
}

}  // namespace roadflow::neural
