#pragma once

#include "stgnn/baselines.hpp"
#include "stgnn/data.hpp"
#include "stgnn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace stgnn {

inline constexpr int kCheckpointFormatVersion = 1;

using AnyModel = std::variant<StgnnModel, MlpBaseline>;

struct Checkpoint {
    AnyModel model;
    Scaler scaler;
    std::uint64_t rng_seed = 0;
};

/// Versioned JSON:
///   {"format_version": 1, "config": {"model": "stgnn"|"mlp", ...},
///    "params": {name: {"shape": [r, c], "values": [...]}},
///    "params_digest": "<fnv1a-64 hex>", "scaler": {...}, "rng_seed": int}
/// Values are written in shortest round-trip form, so a reload is bitwise exact.
/// The digest covers parameter names and value bit patterns; any edit to
/// a stored value fails the load.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<NamedParameter> parameters_of(AnyModel& model);
std::string model_kind(const AnyModel& model);

} // namespace stgnn
