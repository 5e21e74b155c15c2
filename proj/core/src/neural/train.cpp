#include "roadflow/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "roadflow/errors.hpp"
#include "roadflow/neural/adam.hpp"

namespace roadflow::neural {

TrainResult train(const ModelConfig& model_config,
                  const std::vector<WindowedSample>& train_set,
                  const std::vector<WindowedSample>& val_set,
                  const TrainConfig& cfg) {
  if (train_set.empty() || val_set.empty()) {
    throw DataError("train: training and validation sets must be non-empty");
  }
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw ConfigError("train: epochs and batch_size must be positive");
  }

  Rng init_rng = Rng::for_stream(cfg.seed, "model-init");
  Rng shuffle_rng = Rng::for_stream(cfg.seed, "batch-shuffle");

  ModelParams params = ModelParams::init(model_config, init_rng);
  AdamOptimizer optimizer({cfg.learning_rate, 0.9, 0.999, 1e-8,
                           cfg.weight_decay});

  TrainResult result;
  result.best = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  int epochs_without_improvement = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates with the project RNG keeps the shuffle reproducible.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double train_loss = 0.0;
    std::size_t samples_seen = 0;
    std::vector<WindowedSample> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      batch.clear();
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
      }
      const BatchGradients bg = loss_and_gradients(params, batch);
      optimizer.step(params, bg.grads);
      train_loss += bg.loss * static_cast<double>(batch.size());
      samples_seen += batch.size();
    }
    train_loss /= static_cast<double>(samples_seen);

    const double val_loss = mean_loss(params, val_set);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      std::ostringstream msg;
      msg << "train: non-finite loss at epoch " << epoch << " (train "
          << train_loss << ", val " << val_loss << ")";
      throw NumericError(msg.str());
    }
    result.log.push_back({epoch, train_loss, val_loss});

    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.best = params;
      epochs_without_improvement = 0;
    } else {
      epochs_without_improvement += 1;
      if (cfg.early_stop_patience > 0 &&
          epochs_without_improvement >= cfg.early_stop_patience) {
        result.early_stopped = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace roadflow::neural
