#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stgnn {

inline constexpr double kMapeFloor = 1e-8;

struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape_percent = 0.0; // NaN when every target is below kMapeFloor
    std::size_t n_points = 0;
    std::size_t mape_excluded = 0;
};

struct MetricReport : Metrics {
    std::vector<Metrics> per_horizon;
};

/// Raw sums that combine exactly across disjoint point sets.
struct MetricAccumulator {
    double sum_sq = 0.0;
    double sum_abs = 0.0;
    double sum_ape = 0.0;
    std::size_t n = 0;
    std::size_t n_mape = 0;

    void add(double pred, double truth);
    void merge(const MetricAccumulator& other);
    /// Throws validation_error when no points were added.
    Metrics finish() const;
};

/// MSE, RMSE, MAE and MAPE (percent) over paired points. MAPE skips targets
/// with |y| < kMapeFloor and reports how many were skipped.
Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth);

/// Table-shaped CSV: `method,mse,rmse,mape,mae`.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& method, const Metrics& m);
std::string report_to_json(const MetricReport& report, const std::string& method);

/// Comparison rows as printed for the cluster-trace experiment
/// (MSE, RMSE, MAPE %, MAE). Carried for reference, never used as oracles.
struct ReferenceRow {
    const char* method;
    double mse;
    double rmse;
    double mape;
    double mae;
};

inline constexpr ReferenceRow kReferenceTable[] = {
    {"BiLSTM", 0.0234, 0.153, 8.72, 0.112},
    {"MLP", 0.0289, 0.170, 9.31, 0.121},
    {"1DCNN", 0.0205, 0.143, 8.11, 0.106},
    {"Transformer", 0.0187, 0.137, 7.84, 0.101},
    {"Ours", 0.0152, 0.123, 6.92, 0.093},
};

/// Reported MAE by prediction horizon and the reported depth optimum.
struct HorizonReference {
    std::size_t horizon;
    double mae;
};
inline constexpr HorizonReference kReferenceHorizonMae[] = {
    {1, 0.093}, {3, 0.098}, {6, 0.105}, {12, 0.118}};
inline constexpr std::size_t kReferenceBestDepth = 4;
inline constexpr double kReferenceBestDepthMae = 0.093;

} // namespace stgnn
