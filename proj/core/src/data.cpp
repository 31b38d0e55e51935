#include "stgnn/data.hpp"

#include "stgnn/error.hpp"
#include "stgnn/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace stgnn {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

// Splits one CSV line; double quotes group fields containing commas.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows; // (line number, fields)
};

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw schema_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " fields, found " +
                               std::to_string(fields.size()));
        }
        table.rows.emplace_back(line_no, std::move(fields));
    }
    if (!have_header) {
        throw empty_input_error("csv: no header row");
    }
    return table;
}

std::size_t column_index(const CsvTable& t, const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) {
        throw schema_error("csv: missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - t.header.begin());
}

double parse_double(const std::string& s, std::size_t line_no, const std::string& col) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw schema_error("csv line " + std::to_string(line_no) + ": column '" + col +
                           "' is not a number: '" + s + "'");
    }
    return v;
}

std::int64_t parse_time(const std::string& s, std::size_t line_no, const std::string& col) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw schema_error("csv line " + std::to_string(line_no) + ": column '" + col +
                           "' is not an integer timestamp: '" + s + "'");
    }
    return v;
}

std::int64_t unit_to_us(TimeUnit u) {
    switch (u) {
    case TimeUnit::us: return 1;
    case TimeUnit::ms: return 1000;
    case TimeUnit::s: return 1000000;
    }
    return 1;
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
    }
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) {
            throw io_error("series cache: truncated file");
        }
    }
    std::uint16_t u16() {
        need(2);
        const auto lo = static_cast<unsigned char>(buf[pos]);
        const auto hi = static_cast<unsigned char>(buf[pos + 1]);
        pos += 2;
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + b])) << (8 * b);
        }
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

} // namespace

// ---------------------------------------------------------------------------

std::vector<UsageRecord> parse_usage_csv(const std::string& text, const ColumnMapping& columns) {
    const CsvTable table = parse_csv(text);
    const std::size_t time_idx = column_index(table, columns.time_col);
    const std::size_t id_idx = column_index(table, columns.id_col);
    std::vector<std::size_t> feature_idx;
    for (const auto& c : columns.feature_cols) {
        feature_idx.push_back(column_index(table, c));
    }
    if (feature_idx.empty()) {
        throw schema_error("csv: no feature columns configured");
    }
    const std::int64_t to_us = unit_to_us(columns.time_unit);

    std::vector<UsageRecord> records;
    records.reserve(table.rows.size());
    for (const auto& [line_no, fields] : table.rows) {
        UsageRecord r;
        r.start_time = parse_time(fields[time_idx], line_no, columns.time_col) * to_us;
        r.machine_id = fields[id_idx];
        if (r.machine_id.empty()) {
            throw schema_error("csv line " + std::to_string(line_no) + ": empty machine id");
        }
        for (std::size_t f = 0; f < feature_idx.size(); ++f) {
            const double v = parse_double(fields[feature_idx[f]], line_no, columns.feature_cols[f]);
            if (!std::isfinite(v) || v < 0.0) {
                throw schema_error("csv line " + std::to_string(line_no) + ": column '" +
                                   columns.feature_cols[f] + "' must be finite and non-negative");
            }
            r.features.push_back(v);
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        throw empty_input_error("csv: no data rows");
    }
    return records;
}

NodeSeries bin_usage(std::vector<UsageRecord> records, const IngestOptions& options) {
    if (!(options.bin_width_s > 0.0)) {
        throw config_error("ingest: bin width must be positive");
    }
    const auto bin_us = static_cast<std::int64_t>(std::llround(options.bin_width_s * 1e6));
    if (bin_us <= 0) {
        throw config_error("ingest: bin width below one microsecond");
    }
    if (!options.node_filter.empty()) {
        std::erase_if(records, [&](const UsageRecord& r) {
            return std::find(options.node_filter.begin(), options.node_filter.end(),
                             r.machine_id) == options.node_filter.end();
        });
    }
    if (records.empty()) {
        throw empty_input_error("ingest: no records left after filtering");
    }

    // a total order on records makes every sum independent of input order
    std::sort(records.begin(), records.end(), [](const UsageRecord& a, const UsageRecord& b) {
        return std::tie(a.machine_id, a.start_time, a.features) <
               std::tie(b.machine_id, b.start_time, b.features);
    });

    std::int64_t t0 = records.front().start_time;
    std::int64_t t1 = t0;
    std::map<std::string, std::int64_t> first_seen;
    for (const auto& r : records) {
        t0 = std::min(t0, r.start_time);
        t1 = std::max(t1, r.start_time);
        auto [it, inserted] = first_seen.emplace(r.machine_id, r.start_time);
        if (!inserted) {
            it->second = std::min(it->second, r.start_time);
        }
    }
    std::vector<std::pair<std::int64_t, std::string>> order;
    for (const auto& [id, t] : first_seen) {
        order.emplace_back(t, id);
    }
    std::sort(order.begin(), order.end());

    const std::size_t d = records.front().features.size();
    const std::size_t n = order.size();
    const auto n_steps = static_cast<std::size_t>((t1 - t0) / bin_us + 1);
    std::map<std::string, std::size_t> index_of;
    NodeSeries s;
    for (std::size_t i = 0; i < n; ++i) {
        index_of[order[i].second] = i;
        s.node_ids.push_back(order[i].second);
    }
    s.bin_width = options.bin_width_s;
    s.feature_names = options.columns.feature_cols;
    if (s.feature_names.size() != d) {
        s.feature_names.clear();
        for (std::size_t f = 0; f < d; ++f) s.feature_names.push_back("f" + std::to_string(f));
    }

    std::vector<Matrix> sums(n_steps, Matrix(n, d));
    std::vector<std::vector<std::size_t>> counts(n_steps, std::vector<std::size_t>(n, 0));
    for (const auto& r : records) {
        if (r.features.size() != d) {
            throw schema_error("ingest: records disagree on feature count");
        }
        const auto bin = static_cast<std::size_t>((r.start_time - t0) / bin_us);
        const std::size_t i = index_of.at(r.machine_id);
        for (std::size_t f = 0; f < d; ++f) {
            sums[bin](i, f) += r.features[f];
        }
        ++counts[bin][i];
    }

    s.values.assign(n_steps, Matrix(n, d));
    s.missing.assign(n_steps, std::vector<std::uint8_t>(n, 0));
    for (std::size_t t = 0; t < n_steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = counts[t][i];
            for (std::size_t f = 0; f < d; ++f) {
                if (c > 0) {
                    s.values[t](i, f) = sums[t](i, f) / static_cast<double>(c);
                } else {
                    s.values[t](i, f) = t > 0 ? s.values[t - 1](i, f) : 0.0;
                }
            }
            s.missing[t][i] = c == 0 ? 1 : 0;
        }
    }
    return s;
}

NodeSeries ingest_usage_csv(const std::filesystem::path& path, const IngestOptions& options) {
    return bin_usage(parse_usage_csv(read_file(path), options.columns), options);
}

std::vector<std::pair<std::string, std::string>> read_attribute_csv(
    const std::filesystem::path& path, const std::string& id_col, const std::string& attr_col) {
    const CsvTable table = parse_csv(read_file(path));
    const std::size_t id_idx = column_index(table, id_col);
    const std::size_t attr_idx = column_index(table, attr_col);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [line_no, fields] : table.rows) {
        out.emplace_back(fields[id_idx], fields[attr_idx]);
    }
    return out;
}

// ---------------------------------------------------------------------------

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw dimension_error("pearson: series lengths differ");
    }
    const std::size_t n = a.size();
    if (n == 0) {
        return 0.0;
    }
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        return 0.0;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> node_feature_series(const NodeSeries& series, std::size_t node,
                                        std::size_t feature) {
    std::vector<double> out;
    out.reserve(series.n_steps());
    for (const Matrix& frame : series.values) {
        out.push_back(frame(node, feature));
    }
    return out;
}

TopologyGraph build_correlation_graph(const NodeSeries& series, double tau,
                                      std::size_t max_degree) {
    if (series.n_steps() < 8) {
        throw empty_input_error("build_correlation_graph: need at least 8 steps, have " +
                                std::to_string(series.n_steps()));
    }
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw config_error("build_correlation_graph: tau must lie in (0, 1]");
    }
    const std::size_t n = series.n_nodes();
    std::vector<std::vector<double>> cpu;
    cpu.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        cpu.push_back(node_feature_series(series, i, 0));
    }
    std::vector<Edge> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = pearson(cpu[i], cpu[j]);
            if (c >= tau) {
                candidates.push_back({i, j, c});
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    std::vector<std::size_t> degree(n, 0);
    std::vector<Edge> kept;
    for (const Edge& e : candidates) {
        if (degree[e.i] < max_degree && degree[e.j] < max_degree) {
            kept.push_back(e);
            ++degree[e.i];
            ++degree[e.j];
        }
    }
    return build_graph(n, kept, series.node_ids).graph;
}

// ---------------------------------------------------------------------------

double Scaler::apply(double x, std::size_t node, std::size_t feature) const {
    const std::size_t k = node * n_features + feature;
    return (x - min[k]) / (max[k] - min[k] + epsilon);
}

double Scaler::invert(double s, std::size_t node, std::size_t feature) const {
    const std::size_t k = node * n_features + feature;
    return s * (max[k] - min[k] + epsilon) + min[k];
}

Matrix Scaler::apply(const Matrix& frame) const {
    if (frame.rows() != n_nodes || frame.cols() > n_features) {
        throw dimension_error("Scaler: frame " + frame.shape_string() + " does not fit scaler (" +
                              std::to_string(n_nodes) + "x" + std::to_string(n_features) + ")");
    }
    Matrix out(frame.rows(), frame.cols());
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        for (std::size_t f = 0; f < frame.cols(); ++f) {
            out(i, f) = apply(frame(i, f), i, f);
        }
    }
    require_finite(out, "Scaler::apply");
    return out;
}

Matrix Scaler::invert(const Matrix& frame) const {
    if (frame.rows() != n_nodes || frame.cols() > n_features) {
        throw dimension_error("Scaler: frame " + frame.shape_string() + " does not fit scaler (" +
                              std::to_string(n_nodes) + "x" + std::to_string(n_features) + ")");
    }
    Matrix out(frame.rows(), frame.cols());
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        for (std::size_t f = 0; f < frame.cols(); ++f) {
            out(i, f) = invert(frame(i, f), i, f);
        }
    }
    require_finite(out, "Scaler::invert");
    return out;
}

NodeSeries Scaler::apply(const NodeSeries& series) const {
    NodeSeries out = series;
    for (Matrix& frame : out.values) {
        frame = apply(frame);
    }
    return out;
}

NodeSeries Scaler::invert(const NodeSeries& series) const {
    NodeSeries out = series;
    for (Matrix& frame : out.values) {
        frame = invert(frame);
    }
    return out;
}

WindowSample Scaler::apply(const WindowSample& sample) const {
    WindowSample out;
    out.t_origin = sample.t_origin;
    for (const Matrix& m : sample.inputs) out.inputs.push_back(apply(m));
    for (const Matrix& m : sample.targets) out.targets.push_back(apply(m));
    return out;
}

Scaler fit_scaler(const NodeSeries& series, std::size_t split_end, ScalerScope scope) {
    if (split_end == 0 || split_end > series.n_steps()) {
        throw validation_error("fit_scaler: split_end " + std::to_string(split_end) +
                               " outside [1, " + std::to_string(series.n_steps()) + "]");
    }
    Scaler s;
    s.n_nodes = series.n_nodes();
    s.n_features = series.n_features();
    s.min.assign(s.n_nodes * s.n_features, 0.0);
    s.max.assign(s.n_nodes * s.n_features, 0.0);
    for (std::size_t i = 0; i < s.n_nodes; ++i) {
        for (std::size_t f = 0; f < s.n_features; ++f) {
            double lo = series.values[0](i, f);
            double hi = lo;
            for (std::size_t t = 1; t < split_end; ++t) {
                lo = std::min(lo, series.values[t](i, f));
                hi = std::max(hi, series.values[t](i, f));
            }
            s.min[i * s.n_features + f] = lo;
            s.max[i * s.n_features + f] = hi;
        }
    }
    if (scope == ScalerScope::feature) {
        for (std::size_t f = 0; f < s.n_features; ++f) {
            double lo = s.min[f], hi = s.max[f];
            for (std::size_t i = 1; i < s.n_nodes; ++i) {
                lo = std::min(lo, s.min[i * s.n_features + f]);
                hi = std::max(hi, s.max[i * s.n_features + f]);
            }
            for (std::size_t i = 0; i < s.n_nodes; ++i) {
                s.min[i * s.n_features + f] = lo;
                s.max[i * s.n_features + f] = hi;
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

std::size_t window_count(std::size_t n_steps, std::size_t k, std::size_t h, std::size_t stride) {
    if (k == 0 || h == 0 || stride == 0) {
        throw config_error("make_windows: window, horizon and stride must be at least 1");
    }
    if (n_steps < k + h) {
        return 0;
    }
    return (n_steps - k - h) / stride + 1;
}

std::vector<WindowSample> make_windows(const NodeSeries& series, std::size_t k, std::size_t h,
                                       std::size_t stride, std::size_t d_out) {
    const std::size_t count = window_count(series.n_steps(), k, h, stride);
    if (count == 0) {
        throw empty_input_error("make_windows: " + std::to_string(series.n_steps()) +
                                " steps cannot hold window " + std::to_string(k) +
                                " + horizon " + std::to_string(h));
    }
    if (d_out == 0 || d_out > series.n_features()) {
        throw config_error("make_windows: d_out must lie in [1, n_features]");
    }
    std::vector<WindowSample> out;
    out.reserve(count);
    const std::size_t n = series.n_nodes();
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t t = s * stride;
        WindowSample w;
        w.t_origin = t;
        for (std::size_t u = t; u < t + k; ++u) {
            w.inputs.push_back(series.values[u]);
        }
        for (std::size_t u = t + k; u < t + k + h; ++u) {
            Matrix target(n, d_out);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t f = 0; f < d_out; ++f) {
                    target(i, f) = series.values[u](i, f);
                }
            }
            w.targets.push_back(std::move(target));
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::size_t covered_end(const std::vector<WindowSample>& samples) {
    std::size_t end = 0;
    for (const auto& s : samples) {
        end = std::max(end, s.t_origin + s.inputs.size() + s.targets.size());
    }
    return end;
}

DatasetSplit chronological_split(std::vector<WindowSample> samples, SplitRatios ratios) {
    if (samples.size() < 3) {
        throw empty_input_error("chronological_split: need at least 3 samples, have " +
                                std::to_string(samples.size()));
    }
    if (ratios.train <= 0.0 || ratios.val <= 0.0 || ratios.test <= 0.0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
        throw config_error("chronological_split: ratios must be positive and sum to 1");
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const WindowSample& a, const WindowSample& b) { return a.t_origin < b.t_origin; });
    const std::size_t n = samples.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.train));
    const auto n_head = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * (ratios.train + ratios.val)));

    DatasetSplit split;
    auto move_range = [&](std::size_t b, std::size_t e, std::vector<WindowSample>& dst) {
        for (std::size_t i = b; i < e; ++i) dst.push_back(std::move(samples[i]));
    };
    move_range(0, n_train, split.train);
    move_range(n_train, n_head, split.val);
    move_range(n_head, n, split.test);

    // a later sample conflicts when its inputs start before the earlier part's last target ends
    auto drop_overlap = [](const std::vector<WindowSample>& before, std::vector<WindowSample>& after) {
        const std::size_t end = covered_end(before);
        std::erase_if(after, [&](const WindowSample& s) { return s.t_origin < end; });
    };
    drop_overlap(split.train, split.val);
    drop_overlap(split.val.empty() ? split.train : split.val, split.test);
    drop_overlap(split.train, split.test);

    if (split.train.empty() || split.val.empty() || split.test.empty()) {
        throw empty_input_error("chronological_split: a split is empty after removing overlap (" +
                                std::to_string(split.train.size()) + "/" +
                                std::to_string(split.val.size()) + "/" +
                                std::to_string(split.test.size()) + ")");
    }
    return split;
}

// ---------------------------------------------------------------------------

void SynthConfig::validate() const {
    if (n_nodes == 0) throw config_error("synth.n_nodes must be at least 1");
    if (n_steps == 0) throw config_error("synth.n_steps must be at least 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw config_error("synth.alpha must lie in [0, 1)");
    if (!(period > 0.0)) throw config_error("synth.period must be positive");
    if (!(burst_rate >= 0.0 && burst_rate <= 1.0)) {
        throw config_error("synth.burst_rate must lie in [0, 1]");
    }
    if (!(noise_sigma >= 0.0)) throw config_error("synth.noise_sigma must be non-negative");
    if (!std::isfinite(beta) || !std::isfinite(burst_scale)) {
        throw config_error("synth.beta and synth.burst_scale must be finite");
    }
    if (!(graph.p >= 0.0 && graph.p <= 1.0)) throw config_error("synth.graph.p must lie in [0, 1]");
    if (!(bin_width > 0.0)) throw config_error("synth.bin_width must be positive");
}

SynthOutput synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    RngStream rng(cfg.seed);
    const std::size_t n = cfg.n_nodes;

    std::vector<Edge> edges;
    switch (cfg.graph.kind) {
    case GraphKind::ring:
        for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
        if (n > 2) edges.push_back({0, n - 1, 1.0});
        break;
    case GraphKind::star:
        for (std::size_t i = 1; i < n; ++i) edges.push_back({0, i, 1.0});
        break;
    case GraphKind::erdos:
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.uniform() < cfg.graph.p) edges.push_back({i, j, 1.0});
            }
        }
        break;
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("m" + std::to_string(i));

    SynthOutput out;
    out.graph = build_graph(n, edges, ids).graph;
    const Matrix adj = normalize(out.graph, NormalizationMode::symmetric).matrix;

    NodeSeries& s = out.series;
    s.node_ids = ids;
    s.feature_names = {"cpu", "mem", "disk_io"};
    s.bin_width = cfg.bin_width;
    s.values.reserve(cfg.n_steps);
    s.missing.assign(cfg.n_steps, std::vector<std::uint8_t>(n, 0));

    std::vector<double> x(n, 0.0);
    std::vector<double> next(n, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t t = 0; t < cfg.n_steps; ++t) {
        Matrix frame(n, 3);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < 3; ++f) frame(i, f) = kSynthFeatureGains[f] * x[i];
        }
        s.values.push_back(std::move(frame));

        for (std::size_t i = 0; i < n; ++i) {
            double diffused = 0.0;
            for (std::size_t j = 0; j < n; ++j) diffused += adj(i, j) * x[j];
            const double phase = two_pi * static_cast<double>(i) / static_cast<double>(n);
            const double seasonal =
                cfg.beta * std::sin(two_pi * static_cast<double>(t) / cfg.period + phase);
            const double burst = rng.uniform() < cfg.burst_rate ? cfg.burst_scale : 0.0;
            const double noise = cfg.noise_sigma * rng.normal();
            next[i] = cfg.alpha * diffused + seasonal + burst + noise;
        }
        std::swap(x, next);
    }
    return out;
}

// ---------------------------------------------------------------------------

void write_series(const NodeSeries& s, const std::filesystem::path& path) {
    const std::size_t n = s.n_nodes();
    const std::size_t d = s.n_features();
    std::string bin;
    bin.reserve(4 + 2 + 32 + s.n_steps() * n * d * 8);
    bin.append("STGN", 4);
    put_u16(bin, kSeriesFormatVersion);
    put_u64(bin, n);
    put_u64(bin, s.n_steps());
    put_u64(bin, d);
    put_f64(bin, s.bin_width);
    for (const Matrix& frame : s.values) {
        for (double v : frame.values()) put_f64(bin, v);
    }

    json side;
    side["node_ids"] = s.node_ids;
    side["feature_names"] = s.feature_names;
    json mask = json::array();
    for (const auto& row : s.missing) {
        std::string bits(row.size(), '0');
        for (std::size_t i = 0; i < row.size(); ++i) bits[i] = row[i] ? '1' : '0';
        mask.push_back(std::move(bits));
    }
    side["missing_mask"] = std::move(mask);

    std::filesystem::path sidecar = path;
    sidecar += ".json";
    atomic_write(sidecar, side.dump(1) + "\n");
    atomic_write(path, bin);
}

NodeSeries read_series(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 4 || std::memcmp(buf.data(), "STGN", 4) != 0) {
        throw io_error("series cache '" + path.string() + "': bad magic");
    }
    Reader r{buf, 4};
    const std::uint16_t version = r.u16();
    if (version != kSeriesFormatVersion) {
        throw io_error("series cache: unsupported version " + std::to_string(version));
    }
    const std::uint64_t n = r.u64();
    const std::uint64_t steps = r.u64();
    const std::uint64_t d = r.u64();
    NodeSeries s;
    s.bin_width = r.f64();
    if (buf.size() - r.pos != steps * n * d * 8) {
        throw io_error("series cache: payload size does not match header");
    }
    s.values.reserve(steps);
    for (std::uint64_t t = 0; t < steps; ++t) {
        std::vector<double> vals(n * d);
        for (auto& v : vals) v = r.f64();
        s.values.emplace_back(n, d, std::move(vals));
    }

    std::filesystem::path sidecar = path;
    sidecar += ".json";
    try {
        const json side = json::parse(read_file(sidecar));
        s.node_ids = side.at("node_ids").get<std::vector<std::string>>();
        s.feature_names = side.at("feature_names").get<std::vector<std::string>>();
        for (const auto& bits : side.at("missing_mask")) {
            const auto str = bits.get<std::string>();
            std::vector<std::uint8_t> row(str.size());
            for (std::size_t i = 0; i < str.size(); ++i) row[i] = str[i] == '1' ? 1 : 0;
            s.missing.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw io_error("series sidecar '" + sidecar.string() + "': " + e.what());
    }
    if (s.node_ids.size() != n || s.feature_names.size() != d || s.missing.size() != steps) {
        throw io_error("series sidecar does not match the binary header");
    }
    for (const auto& row : s.missing) {
        if (row.size() != n) throw io_error("series sidecar: mask row length mismatch");
    }
    return s;
}

std::string to_string(GraphKind kind) {
    switch (kind) {
    case GraphKind::ring: return "ring";
    case GraphKind::erdos: return "erdos";
    case GraphKind::star: return "star";
    }
    return "unknown";
}

std::string to_string(ScalerScope scope) {
    return scope == ScalerScope::node_feature ? "node_feature" : "feature";
}

ScalerScope scaler_scope_from_string(const std::string& name) {
    if (name == "node_feature") return ScalerScope::node_feature;
    if (name == "feature") return ScalerScope::feature;
    throw config_error("unknown scaler scope '" + name + "' (expected node_feature or feature)");
}

GraphKind graph_kind_from_string(const std::string& name) {
    if (name == "ring") return GraphKind::ring;
    if (name == "erdos") return GraphKind::erdos;
    if (name == "star") return GraphKind::star;
    throw config_error("unknown graph kind '" + name + "' (expected ring, erdos or star)");
}

TimeUnit time_unit_from_string(const std::string& name) {
    if (name == "us") return TimeUnit::us;
    if (name == "ms") return TimeUnit::ms;
    if (name == "s") return TimeUnit::s;
    throw config_error("unknown time unit '" + name + "' (expected us, ms or s)");
}

} // namespace stgnn
