#include "stgnn/checkpoint.hpp"

#include "stgnn/error.hpp"
#include "stgnn/io.hpp"
#include "stgnn/serialize.hpp"

#include <bit>
#include <cstdio>

namespace stgnn {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string params_digest(const std::vector<NamedParameter>& params) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const auto& p : params) {
        h = fnv1a(h, p.name.data(), p.name.size());
        for (double v : p.param->value.values()) {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            h = fnv1a(h, &bits, sizeof bits);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::vector<NamedParameter> parameters_of(AnyModel& model) {
    return std::visit([](auto& m) { return m.parameters(); }, model);
}

std::string model_kind(const AnyModel& model) {
    return std::holds_alternative<StgnnModel>(model) ? "stgnn" : "mlp";
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    AnyModel model = ckpt.model;
    json config;
    if (const auto* s = std::get_if<StgnnModel>(&model)) {
        config = to_json(s->config);
    } else {
        config = to_json(std::get<MlpBaseline>(model).config);
    }
    config["model"] = model_kind(model);

    const auto params = parameters_of(model);
    json pj = json::object();
    for (const auto& p : params) {
        const Matrix& v = p.param->value;
        pj[p.name] = {{"shape", {v.rows(), v.cols()}},
                      {"values", std::vector<double>(v.values().begin(), v.values().end())}};
    }
    json doc;
    doc["format_version"] = kCheckpointFormatVersion;
    doc["config"] = std::move(config);
    doc["params"] = std::move(pj);
    doc["params_digest"] = params_digest(params);
    doc["scaler"] = to_json(ckpt.scaler);
    doc["rng_seed"] = ckpt.rng_seed;
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw io_error(std::string("checkpoint: unreadable JSON (") + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("format_version")) {
        throw io_error("checkpoint: missing format_version");
    }
    if (!doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != kCheckpointFormatVersion) {
        throw io_error("checkpoint: unsupported format_version " + doc["format_version"].dump());
    }
    for (const char* key : {"config", "params", "params_digest", "scaler", "rng_seed"}) {
        if (!doc.contains(key)) {
            throw io_error(std::string("checkpoint: missing '") + key + "'");
        }
    }

    Checkpoint ckpt;
    json config = doc["config"];
    if (!config.is_object() || !config.contains("model") || !config["model"].is_string()) {
        throw io_error("checkpoint: config.model missing");
    }
    const std::string kind = config["model"].get<std::string>();
    config.erase("model");
    if (kind == "stgnn") {
        ckpt.model = StgnnModel::init(model_config_from_json(config), 0);
    } else if (kind == "mlp") {
        ckpt.model = MlpBaseline::init(mlp_config_from_json(config), 0);
    } else {
        throw io_error("checkpoint: unknown model kind '" + kind + "'");
    }

    const json& pj = doc["params"];
    auto params = parameters_of(ckpt.model);
    if (!pj.is_object() || pj.size() != params.size()) {
        throw dimension_error("checkpoint: parameter set does not match the configuration");
    }
    try {
        for (const auto& p : params) {
            if (!pj.contains(p.name)) {
                throw dimension_error("checkpoint: missing parameter '" + p.name + "'");
            }
            const json& entry = pj[p.name];
            const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2 || shape[0] != p.param->rows() || shape[1] != p.param->cols()) {
                throw dimension_error("checkpoint: parameter '" + p.name + "' has shape " +
                                      entry.at("shape").dump() + ", configuration expects " +
                                      p.param->value.shape_string());
            }
            auto values = entry.at("values").get<std::vector<double>>();
            if (values.size() != shape[0] * shape[1]) {
                throw dimension_error("checkpoint: parameter '" + p.name +
                                      "' value count does not match its shape");
            }
            p.param->assign(Matrix(shape[0], shape[1], std::move(values)));
        }
        if (doc["params_digest"].get<std::string>() != params_digest(params)) {
            throw io_error("checkpoint: parameter digest mismatch (file is corrupted)");
        }
        ckpt.scaler = scaler_from_json(doc["scaler"]);
        ckpt.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw io_error(std::string("checkpoint: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    atomic_write(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return checkpoint_from_json(read_file(path));
}

} // namespace stgnn
