#pragma once

#include <string>
#include <vector>

#include "roadflow/neural/model.hpp"
#include "roadflow/neural/train.hpp"

namespace roadflow::neural {

/// Versioned, self-describing model document. Parameter tensors round-trip
/// bit-exactly (shortest-round-trip double formatting in the JSON layer).
struct Checkpoint {
  ModelParams params;
  TrainConfig train_config;
  std::vector<EpochLog> training_log;
  /// File name of the normalizer document the model expects (relative to the
  /// checkpoint's directory).
  std::string normalizer_ref;

  std::string to_json() const;
  static Checkpoint from_json(const std::string& text);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace roadflow::neural
