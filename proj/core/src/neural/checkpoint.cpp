#include "roadflow/neural/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roadflow/errors.hpp"

namespace roadflow::neural {

namespace {

constexpr int kFormatVersion = 1;

}  // namespace

std::string Checkpoint::to_json() const {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["model"] = {
      {"kind", to_string(params.config.kind)},
      {"input_dim", params.config.input_dim},
      {"hidden_dim", params.config.hidden_dim},
      {"attention_dim", params.config.attention_dim},
  };
  doc["train_config"] = {
      {"epochs", train_config.epochs},
      {"batch_size", train_config.batch_size},
      {"learning_rate", train_config.learning_rate},
      {"weight_decay", train_config.weight_decay},
      {"early_stop_patience", train_config.early_stop_patience},
      {"seed", train_config.seed},
  };
  doc["normalizer_ref"] = normalizer_ref;

  nlohmann::json tensors = nlohmann::json::object();
  for (const TensorRef& ref : params.tensors()) {
    nlohmann::json entry;
    entry["rows"] = ref.rows;
    entry["cols"] = ref.cols;
    // Row-major export regardless of Eigen's internal layout.
    nlohmann::json data = nlohmann::json::array();
    for (long r = 0; r < ref.rows; ++r) {
      for (long c = 0; c < ref.cols; ++c) {
        data.push_back(ref.data[c * ref.rows + r]);
      }
    }
    entry["data"] = std::move(data);
    tensors[ref.name] = std::move(entry);
  }
  doc["parameters"] = std::move(tensors);

  nlohmann::json log = nlohmann::json::array();
  for (const EpochLog& e : training_log) {
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"val_loss", e.val_loss}});
  }
  doc["training_log"] = std::move(log);
  return doc.dump(2);
}

Checkpoint Checkpoint::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  if (doc.value("format_version", -1) != kFormatVersion) {
    throw DataError("checkpoint: unsupported format_version");
  }

  Checkpoint ckpt;
  const auto& model = doc.at("model");
  ckpt.params.config.kind =
      model_kind_from_string(model.at("kind").get<std::string>());
  ckpt.params.config.input_dim = model.at("input_dim").get<int>();
  ckpt.params.config.hidden_dim = model.at("hidden_dim").get<int>();
  ckpt.params.config.attention_dim = model.at("attention_dim").get<int>();

  const auto& tc = doc.at("train_config");
  ckpt.train_config.epochs = tc.at("epochs").get<int>();
  ckpt.train_config.batch_size = tc.at("batch_size").get<int>();
  ckpt.train_config.learning_rate = tc.at("learning_rate").get<double>();
  ckpt.train_config.weight_decay = tc.at("weight_decay").get<double>();
  ckpt.train_config.early_stop_patience =
      tc.at("early_stop_patience").get<int>();
  ckpt.train_config.seed = tc.at("seed").get<std::uint64_t>();
  ckpt.normalizer_ref = doc.value("normalizer_ref", "");

  // Shape the tensors from the config, then fill them from the document.
  Rng throwaway(0);
  ckpt.params = [&] {
    ModelParams shaped = ModelParams::init(ckpt.params.config, throwaway);
    return ModelParams::zeros_like(shaped);
  }();

  const auto& tensors = doc.at("parameters");
  for (TensorRef ref : ckpt.params.tensors()) {
    if (!tensors.contains(ref.name)) {
      throw DataError("checkpoint: missing tensor '" + ref.name + "'");
    }
    const auto& entry = tensors.at(ref.name);
    if (entry.at("rows").get<long>() != ref.rows ||
        entry.at("cols").get<long>() != ref.cols) {
      throw DataError("checkpoint: tensor '" + ref.name + "' has wrong shape");
    }
    const auto& data = entry.at("data");
    if (static_cast<long>(data.size()) != ref.size()) {
      throw DataError("checkpoint: tensor '" + ref.name + "' has wrong size");
    }
    long i = 0;
    for (long r = 0; r < ref.rows; ++r) {
      for (long c = 0; c < ref.cols; ++c, ++i) {
        ref.data[c * ref.rows + r] = data[static_cast<std::size_t>(i)].get<double>();
      }
    }
  }

  for (const auto& e : doc.value("training_log", nlohmann::json::array())) {
    ckpt.training_log.push_back({e.at("epoch").get<int>(),
                                 e.at("train_loss").get<double>(),
                                 e.at("val_loss").get<double>()});
  }
  return ckpt;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw DataError("checkpoint: cannot open '" + path + "' for writing");
  }
  out << to_json() << '\n';
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("checkpoint: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace roadflow::neural
