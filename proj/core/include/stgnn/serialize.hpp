#pragma once

// JSON mappings for configuration types. Parsers accept partial objects
// (missing keys keep their defaults) and reject unknown keys with config_error.

#include "stgnn/baselines.hpp"
#include "stgnn/data.hpp"
#include "stgnn/model.hpp"
#include "stgnn/train.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace stgnn {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

nlohmann::json to_json(const MlpConfig& c);
MlpConfig mlp_config_from_json(const nlohmann::json& j, MlpConfig base = {});

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::json to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig base = {});

nlohmann::json to_json(const Scaler& s);
Scaler scaler_from_json(const nlohmann::json& j);

} // namespace stgnn
