#include "stgnn/model.hpp"

#include "stgnn/error.hpp"

#include <cmath>

namespace stgnn {

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) {
            throw config_error(std::string("model.") + name + " must be at least 1");
        }
    };
    positive(n_features, "n_features");
    positive(d_hidden_gcn, "d_hidden_gcn");
    positive(n_gcn_layers, "n_gcn_layers");
    positive(d_hidden_gru, "d_hidden_gru");
    positive(horizon, "horizon");
    positive(d_out, "d_out");
    positive(window, "window");
    if (n_gcn_layers > 6) {
        throw config_error("model.n_gcn_layers must be at most 6");
    }
    if (d_out > n_features) {
        throw config_error("model.d_out cannot exceed model.n_features");
    }
    if (gcn_activation == Activation::logistic) {
        throw config_error("model.gcn_activation must be relu or tanh");
    }
}

StgnnModel StgnnModel::init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    RngStream rng(seed);
    StgnnModel m;
    m.config = config;
    for (std::size_t l = 0; l < config.n_gcn_layers; ++l) {
        const std::size_t d_in = l == 0 ? config.n_features : config.d_hidden_gcn;
        m.gcn_stack.push_back(GcnLayer::init(d_in, config.d_hidden_gcn, config.gcn_activation, rng));
    }
    m.gru = GruCell::init(config.d_hidden_gcn, config.d_hidden_gru, rng);
    const std::size_t dec_in =
        config.d_hidden_gru + (config.fuse_concat_last_gcn ? config.d_hidden_gcn : 0);
    m.decoder = Decoder::init(dec_in, config.horizon, config.d_out, rng);
    return m;
}

std::vector<NamedParameter> StgnnModel::parameters() {
    std::vector<NamedParameter> out;
    for (std::size_t l = 0; l < gcn_stack.size(); ++l) {
        out.push_back({"gcn." + std::to_string(l) + ".w", &gcn_stack[l].w});
    }
    out.push_back({"gru.w_z", &gru.w_z});
    out.push_back({"gru.w_r", &gru.w_r});
    out.push_back({"gru.w_h", &gru.w_h});
    out.push_back({"gru.u_z", &gru.u_z});
    out.push_back({"gru.u_r", &gru.u_r});
    out.push_back({"gru.u_h", &gru.u_h});
    out.push_back({"decoder.w", &decoder.w});
    out.push_back({"decoder.b", &decoder.b});
    return out;
}

std::size_t StgnnModel::n_parameters() const {
    std::size_t n = 0;
    for (const auto& l : gcn_stack) {
        n += l.w.value.size();
    }
    for (const Parameter* p : {&gru.w_z, &gru.w_r, &gru.w_h, &gru.u_z, &gru.u_r, &gru.u_h,
                               &decoder.w, &decoder.b}) {
        n += p->value.size();
    }
    return n;
}

std::vector<Matrix> split_horizon(const Matrix& decoded, std::size_t horizon, std::size_t d_out) {
    if (decoded.cols() != horizon * d_out) {
        throw dimension_error("split_horizon: " + decoded.shape_string() +
                              " is not N x (horizon * d_out)");
    }
    std::vector<Matrix> frames(horizon, Matrix(decoded.rows(), d_out));
    for (std::size_t i = 0; i < decoded.rows(); ++i) {
        for (std::size_t j = 0; j < horizon; ++j) {
            for (std::size_t f = 0; f < d_out; ++f) {
                frames[j](i, f) = decoded(i, j * d_out + f);
            }
        }
    }
    return frames;
}

Matrix join_horizon(std::span<const Matrix> frames) {
    if (frames.empty()) {
        throw dimension_error("join_horizon: no frames");
    }
    const std::size_t n = frames[0].rows();
    const std::size_t d = frames[0].cols();
    Matrix out(n, frames.size() * d);
    for (std::size_t j = 0; j < frames.size(); ++j) {
        if (frames[j].rows() != n || frames[j].cols() != d) {
            throw dimension_error("join_horizon: frame shapes differ");
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < d; ++f) {
                out(i, j * d + f) = frames[j](i, f);
            }
        }
    }
    return out;
}

ForwardResult forward(const StgnnModel& model, const NormalizedAdjacency& adj,
                      std::span<const Matrix> inputs) {
    const ModelConfig& cfg = model.config;
    if (inputs.size() != cfg.window) {
        throw dimension_error("forward: window has " + std::to_string(inputs.size()) +
                              " steps, model expects " + std::to_string(cfg.window));
    }
    for (const Matrix& x : inputs) {
        if (x.rows() != adj.n_nodes || x.cols() != cfg.n_features) {
            throw dimension_error("forward: input frame " + x.shape_string() + " expected (" +
                                  std::to_string(adj.n_nodes) + "x" +
                                  std::to_string(cfg.n_features) + ")");
        }
    }

    ForwardResult r;
    r.cache.gcn.resize(inputs.size());
    r.cache.gru.reserve(inputs.size());
    Matrix h(adj.n_nodes, cfg.d_hidden_gru);
    Matrix last_spatial;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        Matrix z = inputs[t];
        for (const GcnLayer& layer : model.gcn_stack) {
            GcnResult g = gcn_forward(adj, z, layer);
            z = std::move(g.out);
            r.cache.gcn[t].push_back(std::move(g.cache));
        }
        GruResult step = gru_step(z, h, model.gru);
        h = std::move(step.h);
        r.cache.gru.push_back(std::move(step.cache));
        last_spatial = std::move(z);
    }

    if (cfg.fuse_concat_last_gcn) {
        Matrix fused(adj.n_nodes, h.cols() + last_spatial.cols());
        for (std::size_t i = 0; i < adj.n_nodes; ++i) {
            for (std::size_t c = 0; c < h.cols(); ++c) fused(i, c) = h(i, c);
            for (std::size_t c = 0; c < last_spatial.cols(); ++c) {
                fused(i, h.cols() + c) = last_spatial(i, c);
            }
        }
        r.cache.fused = std::move(fused);
    } else {
        r.cache.fused = std::move(h);
    }
    r.pred = split_horizon(decode(r.cache.fused, model.decoder), cfg.horizon, cfg.d_out);
    return r;
}

ForwardResult forward(const StgnnModel& model, const NormalizedAdjacency& adj,
                      const WindowSample& sample) {
    return forward(model, adj, std::span<const Matrix>(sample.inputs));
}

std::vector<Matrix> predict(const StgnnModel& model, const NormalizedAdjacency& adj,
                            std::span<const Matrix> recent_window) {
    return forward(model, adj, recent_window).pred;
}

namespace {

std::size_t check_pair(std::span<const Matrix> pred, std::span<const Matrix> targets) {
    if (pred.size() != targets.size() || pred.empty()) {
        throw dimension_error("loss: " + std::to_string(pred.size()) + " prediction frames vs " +
                              std::to_string(targets.size()) + " target frames");
    }
    std::size_t count = 0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        if (!pred[j].same_shape(targets[j])) {
            throw dimension_error("loss: frame " + std::to_string(j) + " shape " +
                                  pred[j].shape_string() + " vs " + targets[j].shape_string());
        }
        count += pred[j].size();
    }
    return count;
}

} // namespace

double loss(std::span<const Matrix> pred, std::span<const Matrix> targets) {
    const std::size_t count = check_pair(pred, targets);
    double sum = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        auto p = pred[j].values();
        auto y = targets[j].values();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = p[i] - y[i];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(count);
}

std::vector<Matrix> loss_gradient(std::span<const Matrix> pred, std::span<const Matrix> targets,
                                  double scale) {
    const std::size_t count = check_pair(pred, targets);
    const double factor = 2.0 * scale / static_cast<double>(count);
    std::vector<Matrix> grads;
    grads.reserve(pred.size());
    for (std::size_t j = 0; j < pred.size(); ++j) {
        Matrix g = sub(pred[j], targets[j]);
        g.scale_in_place(factor);
        grads.push_back(std::move(g));
    }
    return grads;
}

void backward(StgnnModel& model, const NormalizedAdjacency& adj, const StgnnCache& cache,
              std::span<const Matrix> pred, std::span<const Matrix> targets, double scale) {
    const ModelConfig& cfg = model.config;
    if (cache.gru.size() != cfg.window || cache.gcn.size() != cfg.window) {
        throw dimension_error("backward: cache does not come from a forward of this model");
    }
    const std::vector<Matrix> grad_pred = loss_gradient(pred, targets, scale);
    const Matrix grad_fused =
        decode_backward(cache.fused, join_horizon(grad_pred), model.decoder);

    const std::size_t n = adj.n_nodes;
    Matrix grad_h(n, cfg.d_hidden_gru);
    Matrix grad_last_spatial;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cfg.d_hidden_gru; ++c) {
            grad_h(i, c) = grad_fused(i, c);
        }
    }
    if (cfg.fuse_concat_last_gcn) {
        grad_last_spatial = Matrix(n, cfg.d_hidden_gcn);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < cfg.d_hidden_gcn; ++c) {
                grad_last_spatial(i, c) = grad_fused(i, cfg.d_hidden_gru + c);
            }
        }
    }

    for (std::size_t t = cfg.window; t-- > 0;) {
        GruGrads gg = gru_backward(cache.gru[t], grad_h, model.gru);
        grad_h = std::move(gg.h_prev);
        Matrix g = std::move(gg.x);
        if (t + 1 == cfg.window && cfg.fuse_concat_last_gcn) {
            g.add_in_place(grad_last_spatial);
        }
        for (std::size_t l = model.gcn_stack.size(); l-- > 0;) {
            g = gcn_backward(adj, cache.gcn[t][l], g, model.gcn_stack[l]);
        }
    }
}

double accumulate_gradients(StgnnModel& model, const NormalizedAdjacency& adj,
                            const WindowSample& sample, double scale) {
    ForwardResult r = forward(model, adj, sample);
    const double value = loss(r.pred, sample.targets);
    backward(model, adj, r.cache, r.pred, sample.targets, scale);
    return value;
}

double sample_loss(const StgnnModel& model, const NormalizedAdjacency& adj,
                   const WindowSample& sample) {
    return loss(predict(model, adj, sample.inputs), sample.targets);
}

std::vector<Matrix> predict_sample(const StgnnModel& model, const NormalizedAdjacency& adj,
                                   const WindowSample& sample) {
    return predict(model, adj, sample.inputs);
}

} // namespace stgnn
