#include <doctest.h>

#include <cmath>

#include "roadflow/errors.hpp"
#include "roadflow/neural/adam.hpp"
#include "roadflow/neural/logistic.hpp"
#include "roadflow/neural/metrics.hpp"
#include "roadflow/neural/model.hpp"

using namespace roadflow;
using namespace roadflow::neural;

namespace {

GruParams zero_gru(int hidden, int input) {
  GruParams p;
  p.w_r = Eigen::MatrixXd::Zero(hidden, hidden + input);
  p.w_z = Eigen::MatrixXd::Zero(hidden, hidden + input);
  p.w_c = Eigen::MatrixXd::Zero(hidden, hidden + input);
  p.b_r = Eigen::VectorXd::Zero(hidden);
  p.b_z = Eigen::VectorXd::Zero(hidden);
  p.b_c = Eigen::VectorXd::Zero(hidden);
  return p;
}

WindowedSample sample_from(const Eigen::MatrixXd& seq, int label) {
  WindowedSample s;
  s.sequence = seq;
  s.label = label;
  return s;
}

}  // namespace

TEST_CASE("gru_cell with zero parameters") {
  const GruParams p = zero_gru(4, 3);
  const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(4);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  // r = z = sigmoid(0) = 0.5, candidate = tanh(0) = 0, h = 0.5 * 0 = 0.
  CHECK(gru_cell(h0, x, p).isZero(1e-15));

  Eigen::VectorXd h(4);
  h << 0.4, -0.2, 0.8, -0.9;
  const Eigen::VectorXd out = gru_cell(h, x, p);
  CHECK(out.isApprox(0.5 * h, 1e-12));
}

TEST_CASE("gru_cell output stays inside the unit cube") {
  Rng rng(10);
  ModelConfig mc{ModelKind::gru, 3, 16, 8};
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = ModelParams::init(mc, rng);
    Eigen::VectorXd h(16);
    for (int i = 0; i < 16; ++i) {
      h(i) = rng.uniform(-1.0, 1.0);
    }
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) {
      x(i) = rng.normal(0.0, 2.0);
    }
    const Eigen::VectorXd out = gru_cell(h, x, p.gru);
    for (int i = 0; i < out.size(); ++i) {
      CHECK(out(i) > -1.0);
      CHECK(out(i) < 1.0);
    }
  }
}

TEST_CASE("gru_cell shape mismatch raises ConfigError") {
  const GruParams p = zero_gru(4, 3);
  CHECK_THROWS_AS(gru_cell(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(3),
                           p),
                  ConfigError);
}

TEST_CASE("gru_forward basics") {
  Rng rng(11);
  const ModelParams p = ModelParams::init({ModelKind::gru, 3, 8, 4}, rng);

  Eigen::MatrixXd seq(1, 3);
  seq << 0.3, -0.4, 1.1;
  const Eigen::MatrixXd states = gru_forward(seq, p.gru);
  CHECK(states.row(0).transpose().isApprox(
      gru_cell(Eigen::VectorXd::Zero(8), seq.row(0).transpose(), p.gru)));

  // Zero parameters keep the zero fixed point.
  Eigen::MatrixXd longer(5, 3);
  longer.setRandom();
  CHECK(gru_forward(longer, zero_gru(8, 3)).isZero(1e-15));

  // Prefix property: truncating the sequence reproduces the leading states.
  const Eigen::MatrixXd full = gru_forward(longer, p.gru);
  const Eigen::MatrixXd prefix = gru_forward(longer.topRows(3), p.gru);
  CHECK(full.topRows(3).isApprox(prefix, 1e-12));

  CHECK_THROWS_AS(gru_forward(Eigen::MatrixXd(0, 3), p.gru), DataError);
}

TEST_CASE("hidden states stay bounded from a zero start") {
  Rng rng(12);
  const ModelParams p = ModelParams::init({ModelKind::gru, 3, 32, 8}, rng);
  Eigen::MatrixXd seq(20, 3);
  for (int t = 0; t < 20; ++t) {
    for (int f = 0; f < 3; ++f) {
      seq(t, f) = rng.normal(0.0, 3.0);
    }
  }
  const Eigen::MatrixXd states = gru_forward(seq, p.gru);
  CHECK((states.array().abs() < 1.0).all());
}

TEST_CASE("attention weights form a shift-invariant softmax") {
  Rng rng(13);
  const ModelParams p =
      ModelParams::init({ModelKind::gru_attention, 3, 8, 4}, rng);

  Eigen::MatrixXd seq(6, 3);
  seq.setRandom();
  const Eigen::MatrixXd states = gru_forward(seq, p.gru);
  const AttentionResult result = attention(states, seq, p.attention);
  CHECK(result.weights.size() == 6);
  CHECK(result.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
  for (int t = 0; t < 6; ++t) {
    CHECK(result.weights(t) > 0.0);
  }

  // Equal scores (zero v) give uniform weights.
  AttentionParams uniform = p.attention;
  uniform.v.setZero();
  const AttentionResult flat = attention(states, seq, uniform);
  for (int t = 0; t < 6; ++t) {
    CHECK(flat.weights(t) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
  CHECK(flat.context.isApprox(
      (states.colwise().sum() / 6.0).transpose(), 1e-9));
}

TEST_CASE("model_forward is a probability") {
  Rng rng(14);
  ModelParams p = ModelParams::init({ModelKind::gru_attention, 3, 8, 4}, rng);
  Eigen::MatrixXd seq(10, 3);
  seq.setRandom();
  const double prob = model_forward(p, seq);
  CHECK(prob > 0.0);
  CHECK(prob < 1.0);

  p.head.w.setZero();
  p.head.bias = 0.0;
  CHECK(model_forward(p, seq) == doctest::Approx(0.5));
}

TEST_CASE("single-step attention equals the plain readout") {
  Rng rng(15);
  ModelParams attn =
      ModelParams::init({ModelKind::gru_attention, 3, 8, 4}, rng);
  ModelParams plain = attn;
  plain.config.kind = ModelKind::gru;

  Eigen::MatrixXd seq(1, 3);
  seq << 0.5, -1.0, 0.25;
  // With T = 1 the attention weight is forced to 1, so both heads see h_1.
  CHECK(model_forward(attn, seq) ==
        doctest::Approx(model_forward(plain, seq)).epsilon(1e-12));
}

TEST_CASE("loss values at known probabilities") {
  Rng rng(16);
  ModelParams p = ModelParams::init({ModelKind::gru, 3, 8, 4}, rng);
  Eigen::MatrixXd seq(10, 3);
  seq.setRandom();

  p.head.w.setZero();
  p.head.bias = 0.0;
  CHECK(mean_loss(p, {sample_from(seq, 1)}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  p.head.bias = 50.0;  // prob -> 1
  CHECK(mean_loss(p, {sample_from(seq, 1)}) < 1e-9);
}

TEST_CASE("untrained loss on balanced data is near ln 2") {
  Rng rng(17);
  const ModelParams p =
      ModelParams::init({ModelKind::gru_attention, 3, 16, 8}, rng);
  std::vector<WindowedSample> batch;
  for (int i = 0; i < 64; ++i) {
    Eigen::MatrixXd seq(10, 3);
    for (int t = 0; t < 10; ++t) {
      for (int f = 0; f < 3; ++f) {
        seq(t, f) = rng.normal(0.0, 1.0);
      }
    }
    batch.push_back(sample_from(seq, i % 2));
  }
  CHECK(mean_loss(p, batch) == doctest::Approx(std::log(2.0)).epsilon(0.15));
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
  Rng rng(18);
  ModelParams p = ModelParams::init({ModelKind::gru, 3, 4, 2}, rng);
  const ModelParams before = p;
  AdamOptimizer opt({1e-3, 0.9, 0.999, 1e-8, 0.0});
  opt.step(p, ModelParams::zeros_like(p));
  CHECK(p.gru.w_r.isApprox(before.gru.w_r));
  CHECK(p.head.bias == before.head.bias);
}

TEST_CASE("first adam step moves each coordinate about one learning rate") {
  Rng rng(19);
  ModelParams p = ModelParams::init({ModelKind::gru, 3, 4, 2}, rng);
  const ModelParams before = p;
  ModelParams grads = ModelParams::zeros_like(p);
  grads.gru.w_r.setConstant(0.37);
  grads.head.w.setConstant(-2.0);
  AdamOptimizer opt({1e-3, 0.9, 0.999, 1e-8, 0.0});
  opt.step(p, grads);
  const Eigen::MatrixXd delta = (p.gru.w_r - before.gru.w_r).cwiseAbs();
  CHECK(delta.minCoeff() > 0.9e-3);
  CHECK(delta.maxCoeff() < 1.0e-3 + 1e-12);
  const Eigen::VectorXd head_delta = (p.head.w - before.head.w).cwiseAbs();
  CHECK(head_delta.minCoeff() > 0.9e-3);
}

TEST_CASE("adam descends on a fixed tiny dataset") {
  Rng rng(20);
  ModelParams p = ModelParams::init({ModelKind::gru_attention, 3, 6, 3}, rng);
  std::vector<WindowedSample> batch;
  for (int i = 0; i < 8; ++i) {
    Eigen::MatrixXd seq = Eigen::MatrixXd::Constant(10, 3, i % 2 ? 1.0 : -1.0);
    batch.push_back(sample_from(seq, i % 2));
  }
  AdamOptimizer opt({1e-3, 0.9, 0.999, 1e-8, 0.0});
  double last = mean_loss(p, batch);
  for (int step = 0; step < 10; ++step) {
    const BatchGradients bg = loss_and_gradients(p, batch);
    opt.step(p, bg.grads);
    const double now = mean_loss(p, batch);
    CHECK(now <= last + 1e-12);
    last = now;
  }
}

TEST_CASE("logistic predict at zero coefficients is one half") {
  const LogisticParams p;
  CHECK(logistic_predict(p, {1.0, 2.0, 3.0}) == doctest::Approx(0.5));
}

TEST_CASE("logistic fit finds the separating sign") {
  std::vector<LogisticSample> samples;
  for (int i = 0; i < 50; ++i) {
    samples.push_back({{-1.0, 0.0, 0.0}, 0});
    samples.push_back({{+1.0, 0.0, 0.0}, 1});
  }
  const LogisticParams p = logistic_fit(samples);
  CHECK(p.beta(0) > 0.0);
  CHECK(logistic_predict(p, {1.0, 0.0, 0.0}) > 0.9);
  CHECK(logistic_predict(p, {-1.0, 0.0, 0.0}) < 0.1);
}

TEST_CASE("logistic MLE balances fitted probabilities") {
  Rng rng(21);
  std::vector<LogisticSample> samples;
  int positives = 0;
  for (int i = 0; i < 400; ++i) {
    LogisticSample s;
    s.x = {rng.normal(0, 2), rng.normal(10, 3), rng.normal(90, 15)};
    const double logit = 0.4 * s.x(0) + 0.2 * (s.x(1) - 10) -
                         0.05 * (s.x(2) - 90);
    s.label = rng.uniform() < 1.0 / (1.0 + std::exp(-logit)) ? 1 : 0;
    positives += s.label;
    samples.push_back(s);
  }
  const LogisticParams p = logistic_fit(samples);
  // Score equation for the intercept: mean fitted probability equals the
  // positive rate.
  double mean_prob = 0.0;
  for (const LogisticSample& s : samples) {
    mean_prob += logistic_predict(p, s.x);
  }
  mean_prob /= static_cast<double>(samples.size());
  CHECK(mean_prob == doctest::Approx(positives / 400.0).epsilon(1e-3));
}

TEST_CASE("logistic fit rejects single-class data") {
  std::vector<LogisticSample> samples(10);
  CHECK_THROWS_AS(logistic_fit(samples), DataError);
}

TEST_CASE("classification metrics on perfect predictions") {
  const ClassificationMetrics m =
      classification_metrics({1.0, 0.0, 1.0, 0.0}, {1, 0, 1, 0});
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.recall == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(1.0));
  CHECK(m.rmse == doctest::Approx(0.0));
}

TEST_CASE("all-0.5 predictions on balanced labels have RMSE 0.5") {
  const ClassificationMetrics m =
      classification_metrics({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0});
  CHECK(m.rmse == doctest::Approx(0.5));
}

TEST_CASE("hand confusion matrix: tp=8 fp=2 fn=2 tn=8") {
  std::vector<double> preds;
  std::vector<int> labels;
  for (int i = 0; i < 8; ++i) { preds.push_back(0.9); labels.push_back(1); }
  for (int i = 0; i < 2; ++i) { preds.push_back(0.9); labels.push_back(0); }
  for (int i = 0; i < 2; ++i) { preds.push_back(0.1); labels.push_back(1); }
  for (int i = 0; i < 8; ++i) { preds.push_back(0.1); labels.push_back(0); }
  const ClassificationMetrics m = classification_metrics(preds, labels);
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK(m.recall == doctest::Approx(0.8));
  CHECK(m.f1 == doctest::Approx(0.8));
}

TEST_CASE("no positive labels -> recall undefined") {
  CHECK_THROWS_AS(classification_metrics({0.1, 0.2}, {0, 0}), DataError);
}
