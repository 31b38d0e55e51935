#pragma once

#include "stgnn/baselines.hpp"
#include "stgnn/data.hpp"
#include "stgnn/model.hpp"
#include "stgnn/train.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace stgnn::cli {

enum class ModelChoice { stgnn, mlp, persistence };

struct DataConfig {
    std::filesystem::path series; // empty: <output_dir>/series.stgn
    std::filesystem::path graph;  // empty: <output_dir>/graph.json
    std::size_t stride = 1;
    SplitRatios split;
    ScalerScope scaler_scope = ScalerScope::node_feature;
};

enum class GraphSource { correlation, colocation, none };

struct IngestConfig {
    std::filesystem::path csv;
    double bin_width = 0.0;
    ColumnMapping columns;
    std::vector<std::string> node_filter;
    GraphSource graph = GraphSource::correlation;
    double tau = 0.5;
    std::size_t max_degree = 8;
    std::filesystem::path attributes_csv;
    std::string attribute_id_col = "machine_id";
    std::string attribute_col = "platform_id";
};

struct SweepConfig {
    std::vector<std::size_t> depths = {1, 2, 3, 4, 5, 6};
    std::vector<std::size_t> horizons = {1, 3, 6, 12};
};

struct RunConfig {
    ModelChoice model_kind = ModelChoice::stgnn;
    std::filesystem::path output_dir = "out";
    DataConfig data;
    IngestConfig ingest;
    SynthConfig synth;
    ModelConfig model;
    std::size_t mlp_hidden = 64;
    TrainConfig train;
    SweepConfig sweep;

    std::filesystem::path series_path() const;
    std::filesystem::path graph_path() const;
    MlpConfig mlp_config() const;
    /// Throws config_error on any out-of-range value.
    void validate() const;
};

/// Applies `key.path=value` to a JSON document. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses a run config document; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);

/// File (optional) → STGNN_SEED → --set overrides, in increasing priority.
RunConfig load_run_config(const std::filesystem::path& config_path,
                          const std::vector<std::string>& overrides);

std::string to_string(ModelChoice m);
ModelChoice model_choice_from_string(const std::string& s);

} // namespace stgnn::cli
