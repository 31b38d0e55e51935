#include "run_config.hpp"

#include "stgnn/error.hpp"
#include "stgnn/io.hpp"
#include "stgnn/serialize.hpp"

#include <cstdlib>

namespace stgnn::cli {

using nlohmann::json;

namespace {

template <class T>
T get_as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw config_error(where + " has the wrong type");
    }
}

std::size_t get_count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw config_error(where + " must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

GraphSource graph_source_from_string(const std::string& s) {
    if (s == "correlation") return GraphSource::correlation;
    if (s == "colocation") return GraphSource::colocation;
    if (s == "none") return GraphSource::none;
    throw config_error("ingest.graph must be correlation, colocation or none");
}

std::vector<std::size_t> count_list(const json& j, const std::string& where) {
    if (!j.is_array()) {
        throw config_error(where + " must be an array of integers");
    }
    std::vector<std::size_t> out;
    for (const auto& v : j) out.push_back(get_count(v, where));
    return out;
}

} // namespace

std::string to_string(ModelChoice m) {
    switch (m) {
    case ModelChoice::stgnn: return "stgnn";
    case ModelChoice::mlp: return "mlp";
    case ModelChoice::persistence: return "persistence";
    }
    return "unknown";
}

ModelChoice model_choice_from_string(const std::string& s) {
    if (s == "stgnn") return ModelChoice::stgnn;
    if (s == "mlp") return ModelChoice::mlp;
    if (s == "persistence") return ModelChoice::persistence;
    throw config_error("model must be stgnn, mlp or persistence, got '" + s + "'");
}

std::filesystem::path RunConfig::series_path() const {
    return data.series.empty() ? output_dir / "series.stgn" : data.series;
}

std::filesystem::path RunConfig::graph_path() const {
    return data.graph.empty() ? output_dir / "graph.json" : data.graph;
}

MlpConfig RunConfig::mlp_config() const {
    return MlpConfig{model.window, model.n_features, mlp_hidden, model.horizon, model.d_out};
}

void RunConfig::validate() const {
    model.validate();
    train.validate();
    synth.validate();
    mlp_config().validate();
    if (data.stride == 0) throw config_error("data.stride must be at least 1");
    if (data.split.train <= 0.0 || data.split.val <= 0.0 || data.split.test <= 0.0 ||
        std::abs(data.split.train + data.split.val + data.split.test - 1.0) > 1e-9) {
        throw config_error("data.split must be three positive ratios summing to 1");
    }
    for (std::size_t d : sweep.depths) {
        if (d < 1 || d > 6) throw config_error("sweep.depths entries must lie in 1..6");
    }
    for (std::size_t h : sweep.horizons) {
        if (h < 1) throw config_error("sweep.horizons entries must be at least 1");
    }
    if (ingest.bin_width < 0.0) throw config_error("ingest.bin_width must be positive");
    if (!(ingest.tau > 0.0 && ingest.tau <= 1.0)) throw config_error("ingest.tau must lie in (0, 1]");
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw config_error("--set expects key=value, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            throw config_error("--set: malformed key '" + key + "'");
        }
        if (!node->is_object()) {
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

RunConfig run_config_from_json(const json& doc) {
    RunConfig c;
    if (doc.is_null()) {
        return c;
    }
    reject_unknown_keys(doc, {"model_kind", "output_dir", "data", "ingest", "synth", "model", "mlp",
                              "train", "sweep"},
                        "config");
    if (doc.contains("model_kind")) {
        c.model_kind = model_choice_from_string(get_as<std::string>(doc["model_kind"], "model_kind"));
    }
    if (doc.contains("output_dir")) {
        c.output_dir = get_as<std::string>(doc["output_dir"], "output_dir");
    }
    if (doc.contains("data")) {
        const json& d = doc["data"];
        reject_unknown_keys(d, {"series", "graph", "stride", "split", "scaler_scope"}, "data");
        if (d.contains("series")) c.data.series = get_as<std::string>(d["series"], "data.series");
        if (d.contains("graph")) c.data.graph = get_as<std::string>(d["graph"], "data.graph");
        if (d.contains("stride")) c.data.stride = get_count(d["stride"], "data.stride");
        if (d.contains("scaler_scope")) {
            c.data.scaler_scope =
                scaler_scope_from_string(get_as<std::string>(d["scaler_scope"], "data.scaler_scope"));
        }
        if (d.contains("split")) {
            const auto r = get_as<std::vector<double>>(d["split"], "data.split");
            if (r.size() != 3) throw config_error("data.split must have three entries");
            c.data.split = {r[0], r[1], r[2]};
        }
    }
    if (doc.contains("ingest")) {
        const json& g = doc["ingest"];
        reject_unknown_keys(g, {"csv", "bin_width", "time_col", "id_col", "feature_cols", "time_unit",
                                "node_filter", "graph", "tau", "max_degree", "attributes_csv",
                                "attribute_id_col", "attribute_col"},
                            "ingest");
        auto& in = c.ingest;
        if (g.contains("csv")) in.csv = get_as<std::string>(g["csv"], "ingest.csv");
        if (g.contains("bin_width")) in.bin_width = get_as<double>(g["bin_width"], "ingest.bin_width");
        if (g.contains("time_col")) in.columns.time_col = get_as<std::string>(g["time_col"], "ingest.time_col");
        if (g.contains("id_col")) in.columns.id_col = get_as<std::string>(g["id_col"], "ingest.id_col");
        if (g.contains("feature_cols")) {
            in.columns.feature_cols = get_as<std::vector<std::string>>(g["feature_cols"], "ingest.feature_cols");
        }
        if (g.contains("time_unit")) {
            in.columns.time_unit = time_unit_from_string(get_as<std::string>(g["time_unit"], "ingest.time_unit"));
        }
        if (g.contains("node_filter")) {
            in.node_filter = get_as<std::vector<std::string>>(g["node_filter"], "ingest.node_filter");
        }
        if (g.contains("graph")) in.graph = graph_source_from_string(get_as<std::string>(g["graph"], "ingest.graph"));
        if (g.contains("tau")) in.tau = get_as<double>(g["tau"], "ingest.tau");
        if (g.contains("max_degree")) in.max_degree = get_count(g["max_degree"], "ingest.max_degree");
        if (g.contains("attributes_csv")) {
            in.attributes_csv = get_as<std::string>(g["attributes_csv"], "ingest.attributes_csv");
        }
        if (g.contains("attribute_id_col")) {
            in.attribute_id_col = get_as<std::string>(g["attribute_id_col"], "ingest.attribute_id_col");
        }
        if (g.contains("attribute_col")) {
            in.attribute_col = get_as<std::string>(g["attribute_col"], "ingest.attribute_col");
        }
    }
    if (doc.contains("synth")) c.synth = synth_config_from_json(doc["synth"]);
    if (doc.contains("model")) c.model = model_config_from_json(doc["model"]);
    if (doc.contains("mlp")) {
        reject_unknown_keys(doc["mlp"], {"hidden"}, "mlp");
        if (doc["mlp"].contains("hidden")) c.mlp_hidden = get_count(doc["mlp"]["hidden"], "mlp.hidden");
    }
    if (doc.contains("train")) c.train = train_config_from_json(doc["train"]);
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        reject_unknown_keys(s, {"depths", "horizons"}, "sweep");
        if (s.contains("depths")) c.sweep.depths = count_list(s["depths"], "sweep.depths");
        if (s.contains("horizons")) c.sweep.horizons = count_list(s["horizons"], "sweep.horizons");
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& config_path,
                          const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (!config_path.empty()) {
        try {
            doc = json::parse(read_file(config_path));
        } catch (const json::exception& e) {
            throw config_error("config '" + config_path.string() + "': " + e.what());
        }
    }
    if (const char* env = std::getenv("STGNN_SEED"); env != nullptr && *env != '\0') {
        apply_override(doc, std::string("train.seed=") + env);
    }
    for (const auto& o : overrides) {
        apply_override(doc, o);
    }
    return run_config_from_json(doc);
}

} // namespace stgnn::cli
