#pragma once

#include "run_config.hpp"

#include "stgnn/checkpoint.hpp"
#include "stgnn/data.hpp"
#include "stgnn/graph.hpp"
#include "stgnn/train.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stgnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct PreparedData {
    NodeSeries series; // raw scale
    TopologyGraph graph;
    NormalizedAdjacency adj;
    Scaler scaler;
    DatasetSplit split; // scaled samples
};

/// Loads series and graph, cuts windows for (window, horizon), splits
/// chronologically and scales. The scaler is fit on the steps covered by
/// the training split unless `fixed_scaler` is given.
PreparedData prepare_data(const RunConfig& cfg, const std::optional<Scaler>& fixed_scaler = {});

struct TrainOutcome {
    AnyModel model;
    TrainLog log;
};

/// Trains the configured model kind (stgnn or mlp) on prepared data.
TrainOutcome train_configured(const RunConfig& cfg, const PreparedData& data,
                              std::ostream* progress = nullptr);

const std::vector<WindowSample>& split_by_name(const PreparedData& data, const std::string& name);

Evaluation evaluate_model(const AnyModel& model, const PreparedData& data,
                          const std::vector<WindowSample>& samples);

struct SweepPoint {
    std::size_t setting = 0;
    double mae = 0.0;
    TrainLog log;
};

enum class SweepKind { depth, horizon };

/// Retrains from scratch for each setting and reports raw-scale test MAE.
/// Points may run on `jobs` worker threads; results keep the requested order.
std::vector<SweepPoint> run_sweep(const RunConfig& cfg, SweepKind kind,
                                  const std::vector<std::size_t>& settings, std::size_t jobs,
                                  const std::filesystem::path& log_dir);

/// `depth,mae,paper_reported_mae` or `horizon,mae,paper_reported_mae`.
std::string sweep_csv(SweepKind kind, const std::vector<SweepPoint>& points);

std::string table_csv(const std::string& method, const MetricReport& report);

} // namespace stgnn::cli
