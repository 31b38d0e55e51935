#pragma once

#include "stgnn/graph.hpp"
#include "stgnn/matrix.hpp"
#include "stgnn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace stgnn {

// ---------------------------------------------------------------------------
// Trace ingestion

enum class TimeUnit { us, ms, s };

struct ColumnMapping {
    std::string time_col = "start_time";
    std::string id_col = "machine_id";
    std::vector<std::string> feature_cols = {"cpu", "mem", "disk_io"};
    TimeUnit time_unit = TimeUnit::us;
};

/// One resource-usage sample. Times are normalized to microseconds and
/// features follow ColumnMapping::feature_cols (cpu, mem, disk_io by default).
struct UsageRecord {
    std::int64_t start_time = 0;
    std::string machine_id;
    std::vector<double> features;
};

struct IngestOptions {
    double bin_width_s = 0.0; // required, no default
    std::vector<std::string> node_filter; // empty keeps all machines
    ColumnMapping columns;
};

/// Per-node feature frames on a fixed time grid.
struct NodeSeries {
    std::vector<std::string> node_ids;
    std::vector<std::string> feature_names;
    double bin_width = 0.0; // seconds
    std::vector<Matrix> values;                     // [step] N × d
    std::vector<std::vector<std::uint8_t>> missing; // [step][node], 1 where the bin was empty

    std::size_t n_steps() const noexcept { return values.size(); }
    std::size_t n_nodes() const noexcept { return node_ids.size(); }
    std::size_t n_features() const noexcept { return feature_names.size(); }

    friend bool operator==(const NodeSeries&, const NodeSeries&) = default;
};

std::vector<UsageRecord> parse_usage_csv(const std::string& text, const ColumnMapping& columns);

/// Bins records by (time - earliest time) / bin_width and averages each
/// bin. Empty bins repeat the previous bin (0 before a node's first
/// sample) and are flagged in the mask. Nodes are ordered by their
/// earliest timestamp, ties by id. The result does not depend on record order.
NodeSeries bin_usage(std::vector<UsageRecord> records, const IngestOptions& options);

NodeSeries ingest_usage_csv(const std::filesystem::path& path, const IngestOptions& options);

/// (machine id, attribute) pairs from a CSV with a header row.
std::vector<std::pair<std::string, std::string>> read_attribute_csv(
    const std::filesystem::path& path, const std::string& id_col, const std::string& attr_col);

// ---------------------------------------------------------------------------
// Graph construction

/// Pearson correlation; 0 when either series has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Feature `feature` of node `node` over all steps.
std::vector<double> node_feature_series(const NodeSeries& series, std::size_t node,
                                        std::size_t feature = 0);

/// Edges between node pairs whose cpu (feature 0) correlation is >= tau,
/// weighted by the correlation. Candidates are accepted strongest first
/// (ties by lower (i, j)) while both endpoints have fewer than max_degree edges.
TopologyGraph build_correlation_graph(const NodeSeries& series, double tau,
                                      std::size_t max_degree);

// ---------------------------------------------------------------------------
// Scaling

/// Per (node, feature) min-max scaler: (x − min) / (max − min + epsilon).
struct Scaler {
    std::size_t n_nodes = 0;
    std::size_t n_features = 0;
    std::vector<double> min; // [node * n_features + feature]
    std::vector<double> max;
    double epsilon = 1e-8;

    double apply(double x, std::size_t node, std::size_t feature) const;
    double invert(double s, std::size_t node, std::size_t feature) const;
    /// Scales the first frame.cols() features of every node.
    Matrix apply(const Matrix& frame) const;
    Matrix invert(const Matrix& frame) const;
    NodeSeries apply(const NodeSeries& series) const;
    NodeSeries invert(const NodeSeries& series) const;
    WindowSample apply(const WindowSample& sample) const;

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// node_feature: one (min, max) per node and feature.
/// feature: one (min, max) per feature, pooled over all nodes, so every
/// node lands on a common scale.
enum class ScalerScope { node_feature, feature };

/// Fits on steps [0, split_end) only.
Scaler fit_scaler(const NodeSeries& series, std::size_t split_end,
                  ScalerScope scope = ScalerScope::node_feature);

// ---------------------------------------------------------------------------
// Windowing and splits

std::size_t window_count(std::size_t n_steps, std::size_t k, std::size_t h, std::size_t stride);

/// Inputs cover steps [t, t+k), targets [t+k, t+k+h) restricted to the first
/// d_out features, for t = 0, stride, 2·stride, ...
std::vector<WindowSample> make_windows(const NodeSeries& series, std::size_t k, std::size_t h,
                                       std::size_t stride, std::size_t d_out);

struct SplitRatios {
    double train = 0.7;
    double val = 0.15;
    double test = 0.15;
};

struct DatasetSplit {
    std::vector<WindowSample> train;
    std::vector<WindowSample> val;
    std::vector<WindowSample> test;
};

/// Chronological split by t_origin. Cut points are floor(n·train) and
/// floor(n·(train+val)); afterwards the leading samples of val and test
/// whose inputs would overlap the targets of the preceding part are dropped.
DatasetSplit chronological_split(std::vector<WindowSample> samples, SplitRatios ratios = {});

/// One past the last step touched by any sample (inputs or targets).
std::size_t covered_end(const std::vector<WindowSample>& samples);

// ---------------------------------------------------------------------------
// Synthetic traces

enum class GraphKind { ring, erdos, star };

struct GraphSpec {
    GraphKind kind = GraphKind::ring;
    double p = 0.1; // erdos edge probability
};

struct SynthConfig {
    std::size_t n_nodes = 20;
    std::size_t n_steps = 2000;
    std::uint64_t seed = 42;
    double alpha = 0.8;
    double beta = 0.5;
    double period = 48.0;
    double burst_rate = 0.02;
    double burst_scale = 1.0;
    double noise_sigma = 0.05;
    GraphSpec graph;
    double bin_width = 60.0;

    void validate() const;
};

struct SynthOutput {
    TopologyGraph graph;
    NodeSeries series;
};

/// Linear diffusion over the symmetric-normalized graph with seasonal
/// drive, random bursts and Gaussian noise:
///   x_{t+1,i} = alpha·(Ã x_t)_i + beta·sin(2π t / period + 2π i / N) + burst + noise
/// with x_0 = 0. Features are x scaled by 1.0, 0.7 and 0.4.
/// Random draws: graph edges (erdos only), then per step and node one
/// uniform for the burst and one normal for the noise.
SynthOutput synth_generate(const SynthConfig& cfg);

/// Per-feature multipliers applied to the scalar synthetic process.
inline constexpr double kSynthFeatureGains[3] = {1.0, 0.7, 0.4};

// ---------------------------------------------------------------------------
// Series cache: "STGN", u16 version, u64 N, u64 T, u64 d, f64 bin_width,
// then T·N·d little-endian f64 in (step, node, feature) order. Node ids,
// feature names and the missing mask go to a JSON sidecar at <path>.json.

inline constexpr std::uint16_t kSeriesFormatVersion = 1;

void write_series(const NodeSeries& series, const std::filesystem::path& path);
NodeSeries read_series(const std::filesystem::path& path);

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);
TimeUnit time_unit_from_string(const std::string& name);
std::string to_string(ScalerScope scope);
ScalerScope scaler_scope_from_string(const std::string& name);

} // namespace stgnn
