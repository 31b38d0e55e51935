#include "stgnn/metrics.hpp"

#include "stgnn/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace stgnn {

using nlohmann::json;

void MetricAccumulator::add(double pred, double truth) {
    const double e = pred - truth;
    sum_sq += e * e;
    sum_abs += std::abs(e);
    if (std::abs(truth) >= kMapeFloor) {
        sum_ape += std::abs(e) / std::abs(truth);
        ++n_mape;
    }
    ++n;
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
    sum_sq += other.sum_sq;
    sum_abs += other.sum_abs;
    sum_ape += other.sum_ape;
    n += other.n;
    n_mape += other.n_mape;
}

Metrics MetricAccumulator::finish() const {
    if (n == 0) {
        throw validation_error("metrics: no points");
    }
    Metrics m;
    const auto count = static_cast<double>(n);
    m.mse = sum_sq / count;
    m.rmse = std::sqrt(m.mse);
    m.mae = sum_abs / count;
    m.mape_percent = n_mape > 0 ? 100.0 * sum_ape / static_cast<double>(n_mape)
                                : std::numeric_limits<double>::quiet_NaN();
    m.n_points = n;
    m.mape_excluded = n - n_mape;
    return m;
}

Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) {
        throw dimension_error("compute_metrics: " + std::to_string(pred.size()) +
                              " predictions vs " + std::to_string(truth.size()) + " targets");
    }
    MetricAccumulator acc;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        acc.add(pred[i], truth[i]);
    }
    return acc.finish();
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json metrics_json(const Metrics& m) {
    json j;
    j["mse"] = m.mse;
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    j["mape_percent"] = std::isnan(m.mape_percent) ? json(nullptr) : json(m.mape_percent);
    j["n_points"] = m.n_points;
    j["mape_excluded"] = m.mape_excluded;
    return j;
}

} // namespace

std::string metrics_csv_header() { return "method,mse,rmse,mape,mae\n"; }

std::string metrics_csv_row(const std::string& method, const Metrics& m) {
    return method + "," + fmt_double(m.mse) + "," + fmt_double(m.rmse) + "," +
           fmt_double(m.mape_percent) + "," + fmt_double(m.mae) + "\n";
}

std::string report_to_json(const MetricReport& report, const std::string& method) {
    json j = metrics_json(report);
    j["method"] = method;
    json per = json::array();
    for (std::size_t h = 0; h < report.per_horizon.size(); ++h) {
        json row = metrics_json(report.per_horizon[h]);
        row["horizon_step"] = h + 1;
        per.push_back(std::move(row));
    }
    j["per_horizon"] = std::move(per);
    return j.dump(2) + "\n";
}

} // namespace stgnn
