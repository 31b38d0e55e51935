#include "stgnn/serialize.hpp"

#include "stgnn/error.hpp"

#include <algorithm>
#include <cstring>

namespace stgnn {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!j.is_object()) {
        throw config_error(where + ": expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known) {
            throw config_error(where + ": unknown key '" + key + "'");
        }
    }
}

namespace {

template <class T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        return;
    }
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
                throw config_error(where + "." + key + " must be a non-negative integer");
            }
        }
        if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) {
                throw config_error(where + "." + key + " must be a number");
            }
        }
        out = it->get<T>();
    } catch (const json::exception&) {
        throw config_error(where + "." + key + " has the wrong type");
    }
}

} // namespace

json to_json(const ModelConfig& c) {
    return {{"n_features", c.n_features},
            {"d_hidden_gcn", c.d_hidden_gcn},
            {"n_gcn_layers", c.n_gcn_layers},
            {"d_hidden_gru", c.d_hidden_gru},
            {"horizon", c.horizon},
            {"d_out", c.d_out},
            {"window", c.window},
            {"gcn_activation", to_string(c.gcn_activation)},
            {"normalization", to_string(c.normalization)},
            {"fuse_concat_last_gcn", c.fuse_concat_last_gcn}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
    const std::string where = "model";
    reject_unknown_keys(j, {"n_features", "d_hidden_gcn", "n_gcn_layers", "d_hidden_gru",
                            "horizon", "d_out", "window", "gcn_activation", "normalization",
                            "fuse_concat_last_gcn"},
                        where);
    read_into(j, "n_features", c.n_features, where);
    read_into(j, "d_hidden_gcn", c.d_hidden_gcn, where);
    read_into(j, "n_gcn_layers", c.n_gcn_layers, where);
    read_into(j, "d_hidden_gru", c.d_hidden_gru, where);
    read_into(j, "horizon", c.horizon, where);
    read_into(j, "d_out", c.d_out, where);
    read_into(j, "window", c.window, where);
    read_into(j, "fuse_concat_last_gcn", c.fuse_concat_last_gcn, where);
    std::string act = to_string(c.gcn_activation);
    read_into(j, "gcn_activation", act, where);
    c.gcn_activation = activation_from_string(act);
    std::string norm = to_string(c.normalization);
    read_into(j, "normalization", norm, where);
    c.normalization = normalization_from_string(norm);
    return c;
}

json to_json(const MlpConfig& c) {
    return {{"window", c.window},
            {"n_features", c.n_features},
            {"hidden", c.hidden},
            {"horizon", c.horizon},
            {"d_out", c.d_out}};
}

MlpConfig mlp_config_from_json(const json& j, MlpConfig c) {
    const std::string where = "mlp";
    reject_unknown_keys(j, {"window", "n_features", "hidden", "horizon", "d_out"}, where);
    read_into(j, "window", c.window, where);
    read_into(j, "n_features", c.n_features, where);
    read_into(j, "hidden", c.hidden, where);
    read_into(j, "horizon", c.horizon, where);
    read_into(j, "d_out", c.d_out, where);
    return c;
}

json to_json(const TrainConfig& c) {
    return {{"lr", c.lr},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"seed", c.seed},
            {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
            {"early_stop_patience", c.early_stop_patience},
            {"grad_clip_norm", c.grad_clip_norm}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    const std::string where = "train";
    reject_unknown_keys(j, {"lr", "epochs", "batch_size", "seed", "adam", "early_stop_patience",
                            "grad_clip_norm"},
                        where);
    read_into(j, "lr", c.lr, where);
    read_into(j, "epochs", c.epochs, where);
    read_into(j, "batch_size", c.batch_size, where);
    read_into(j, "seed", c.seed, where);
    read_into(j, "early_stop_patience", c.early_stop_patience, where);
    read_into(j, "grad_clip_norm", c.grad_clip_norm, where);
    if (auto it = j.find("adam"); it != j.end()) {
        reject_unknown_keys(*it, {"beta1", "beta2", "eps"}, "train.adam");
        read_into(*it, "beta1", c.adam.beta1, "train.adam");
        read_into(*it, "beta2", c.adam.beta2, "train.adam");
        read_into(*it, "eps", c.adam.eps, "train.adam");
    }
    return c;
}

json to_json(const SynthConfig& c) {
    return {{"n_nodes", c.n_nodes},
            {"n_steps", c.n_steps},
            {"seed", c.seed},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"period", c.period},
            {"burst_rate", c.burst_rate},
            {"burst_scale", c.burst_scale},
            {"noise_sigma", c.noise_sigma},
            {"graph", {{"kind", to_string(c.graph.kind)}, {"p", c.graph.p}}},
            {"bin_width", c.bin_width}};
}

SynthConfig synth_config_from_json(const json& j, SynthConfig c) {
    const std::string where = "synth";
    reject_unknown_keys(j, {"n_nodes", "n_steps", "seed", "alpha", "beta", "period", "burst_rate",
                            "burst_scale", "noise_sigma", "graph", "bin_width"},
                        where);
    read_into(j, "n_nodes", c.n_nodes, where);
    read_into(j, "n_steps", c.n_steps, where);
    read_into(j, "seed", c.seed, where);
    read_into(j, "alpha", c.alpha, where);
    read_into(j, "beta", c.beta, where);
    read_into(j, "period", c.period, where);
    read_into(j, "burst_rate", c.burst_rate, where);
    read_into(j, "burst_scale", c.burst_scale, where);
    read_into(j, "noise_sigma", c.noise_sigma, where);
    read_into(j, "bin_width", c.bin_width, where);
    if (auto it = j.find("graph"); it != j.end()) {
        reject_unknown_keys(*it, {"kind", "p"}, "synth.graph");
        std::string kind = to_string(c.graph.kind);
        read_into(*it, "kind", kind, "synth.graph");
        c.graph.kind = graph_kind_from_string(kind);
        read_into(*it, "p", c.graph.p, "synth.graph");
    }
    return c;
}

json to_json(const Scaler& s) {
    return {{"n_nodes", s.n_nodes},
            {"n_features", s.n_features},
            {"epsilon", s.epsilon},
            {"min", s.min},
            {"max", s.max}};
}

Scaler scaler_from_json(const json& j) {
    reject_unknown_keys(j, {"n_nodes", "n_features", "epsilon", "min", "max"}, "scaler");
    Scaler s;
    try {
        s.n_nodes = j.at("n_nodes").get<std::size_t>();
        s.n_features = j.at("n_features").get<std::size_t>();
        s.epsilon = j.at("epsilon").get<double>();
        s.min = j.at("min").get<std::vector<double>>();
        s.max = j.at("max").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw io_error(std::string("scaler: ") + e.what());
    }
    if (s.min.size() != s.n_nodes * s.n_features || s.max.size() != s.min.size()) {
        throw dimension_error("scaler: min/max length does not match n_nodes * n_features");
    }
    for (std::size_t i = 0; i < s.min.size(); ++i) {
        if (s.max[i] < s.min[i]) {
            throw validation_error("scaler: max below min");
        }
    }
    return s;
}

} // namespace stgnn
