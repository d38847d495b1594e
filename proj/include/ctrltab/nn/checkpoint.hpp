#pragma once

#include "ctrltab/core/vocabulary.hpp"
#include "ctrltab/nn/config.hpp"
#include "ctrltab/nn/tensor.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace ctrltab::nn {

inline constexpr std::string_view kCheckpointMagic = "CTABNET1";

/// Everything needed to restore a model.
struct Checkpoint {
    std::string model_kind;
    ModelConfig config;
    Vocabulary vocab;
    ParameterSet params;
    /// Model-specific settings (e.g. training hyperparameters).
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Layout: 8-byte magic, u64 little-endian header length, JSON header
/// (model_kind, config, seed, vocab, tensor name/shape/offset table, extra),
/// then the tensors as raw little-endian float64 arrays.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws ParseError on a bad magic or truncated payload and ValidationError
/// when the header's shapes disagree with the data or `expected_kind`.
Checkpoint load_checkpoint(const std::string& path, std::string_view expected_kind = {});

} // namespace ctrltab::nn
