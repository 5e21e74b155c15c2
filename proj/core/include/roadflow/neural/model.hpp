#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "roadflow/preprocess.hpp"
#include "roadflow/rng.hpp"

namespace roadflow::neural {

/// Gate weights act on the concatenation [h_prev; x].
struct GruParams {
  Eigen::MatrixXd w_r, w_z, w_c;  // hidden x (hidden + input)
  Eigen::VectorXd b_r, b_z, b_c;  // hidden
};

/// Additive attention: e_t = v^T tanh(W_h h_t + W_x x_t + b).
struct AttentionParams {
  Eigen::MatrixXd w_h;  // score x hidden
  Eigen::MatrixXd w_x;  // score x input
  Eigen::VectorXd v;    // score
  Eigen::VectorXd b;    // score
};

/// Linear + sigmoid readout.
struct HeadParams {
  Eigen::VectorXd w;  // hidden
  double bias = 0.0;
};

enum class ModelKind { gru, gru_attention };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::gru_attention;
  int input_dim = 3;
  int hidden_dim = 64;
  int attention_dim = 32;
};

/// Mutable view over one parameter tensor, used by the optimizer, the
/// gradient checker and the checkpoint writer.
struct TensorRef {
  std::string name;
  double* data = nullptr;
  long rows = 0;
  long cols = 0;
  bool is_bias = false;

  long size() const { return rows * cols; }
};

struct ModelParams {
  ModelConfig config;
  GruParams gru;
  AttentionParams attention;  // empty tensors in plain-GRU mode
  HeadParams head;

  /// Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static ModelParams init(const ModelConfig& config, Rng& rng);

  /// Same shapes, all zeros; the gradient container.
  static ModelParams zeros_like(const ModelParams& other);

  std::vector<TensorRef> tensors();
  std::vector<TensorRef> tensors() const;
};

/// One GRU step. Shapes must match the params; throws ConfigError otherwise.
Eigen::VectorXd gru_cell(const Eigen::VectorXd& h_prev,
                         const Eigen::VectorXd& x, const GruParams& p);

/// Runs the cell over a T x input sequence, h0 = 0. Returns the T x hidden
/// matrix of all hidden states. Throws DataError on an empty sequence.
Eigen::MatrixXd gru_forward(const Eigen::MatrixXd& sequence,
                            const GruParams& p);

struct AttentionResult {
  Eigen::VectorXd weights;  // alpha, length T, sums to 1
  Eigen::VectorXd context;  // hidden
};

/// Softmax-normalized additive attention over the hidden states (max-shifted
/// scores for stability).
AttentionResult attention(const Eigen::MatrixXd& hidden_states,
                          const Eigen::MatrixXd& inputs,
                          const AttentionParams& p);

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
  Eigen::MatrixXd inputs;   // T x input
  Eigen::MatrixXd hidden;   // T x hidden
  Eigen::MatrixXd reset;    // T x hidden
  Eigen::MatrixXd update;   // T x hidden
  Eigen::MatrixXd candidate;  // T x hidden
  // Attention-only members:
  Eigen::MatrixXd scores_tanh;  // T x score
  Eigen::VectorXd alpha;
  Eigen::VectorXd context;
  double logit = 0.0;
  double prob = 0.5;
};

/// Probability of the positive class for one sequence.
double model_forward(const ModelParams& params, const Eigen::MatrixXd& sequence,
                     ForwardCache* cache = nullptr);

struct BatchGradients {
  double loss = 0.0;     // mean binary cross-entropy
  ModelParams grads;
};

/// Mean BCE over the batch and exact analytic gradients for every parameter,
/// backpropagated through the attention block and all gates.
BatchGradients loss_and_gradients(const ModelParams& params,
                                  const std::vector<WindowedSample>& batch);

/// Forward-only mean BCE (clamped probabilities).
double mean_loss(const ModelParams& params,
                 const std::vector<WindowedSample>& batch);

}  // namespace roadflow::neural
