#pragma once

#include <cstdint>
#include <vector>

#include "roadflow/neural/model.hpp"

namespace roadflow::neural {

struct TrainConfig {
  int epochs = 300;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  /// Epochs without validation improvement before stopping; <= 0 disables
  /// early stopping.
  int early_stop_patience = 10;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams best;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool early_stopped = false;
};

/// Mini-batch Adam training with seeded shuffling and early stopping on the
/// validation loss; returns the parameters from the best validation epoch.
/// Throws NumericError if a loss turns non-finite.
TrainResult train(const ModelConfig& model_config,
                  const std::vector<WindowedSample>& train_set,
                  const std::vector<WindowedSample>& val_set,
                  const TrainConfig& cfg);

}  // namespace roadflow::neural
