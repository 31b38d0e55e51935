#include "stgnn/baselines.hpp"

#include "stgnn/error.hpp"
#include "stgnn/layers.hpp"

namespace stgnn {

std::vector<Matrix> persistence_predict(const WindowSample& sample, std::size_t d_out,
                                        std::size_t horizon) {
    if (sample.inputs.empty()) {
        throw dimension_error("persistence_predict: empty window");
    }
    const Matrix& last = sample.inputs.back();
    if (d_out == 0 || d_out > last.cols()) {
        throw dimension_error("persistence_predict: d_out exceeds input features");
    }
    Matrix frame(last.rows(), d_out);
    for (std::size_t i = 0; i < last.rows(); ++i) {
        for (std::size_t f = 0; f < d_out; ++f) {
            frame(i, f) = last(i, f);
        }
    }
    return std::vector<Matrix>(horizon, frame);
}

void MlpConfig::validate() const {
    if (window == 0 || n_features == 0 || hidden == 0 || horizon == 0 || d_out == 0) {
        throw config_error("mlp: all dimensions must be at least 1");
    }
    if (d_out > n_features) {
        throw config_error("mlp: d_out cannot exceed n_features");
    }
}

MlpBaseline MlpBaseline::init(const MlpConfig& config, std::uint64_t seed) {
    config.validate();
    RngStream rng(seed);
    MlpBaseline m;
    m.config = config;
    const std::size_t in = config.window * config.n_features;
    const std::size_t out = config.horizon * config.d_out;
    m.w1 = Parameter(glorot_uniform(in, config.hidden, rng));
    m.b1 = Parameter(Matrix(1, config.hidden));
    m.w2 = Parameter(glorot_uniform(config.hidden, out, rng));
    m.b2 = Parameter(Matrix(1, out));
    return m;
}

std::vector<NamedParameter> MlpBaseline::parameters() {
    return {{"mlp.w1", &w1}, {"mlp.b1", &b1}, {"mlp.w2", &w2}, {"mlp.b2", &b2}};
}

Matrix flatten_window(std::span<const Matrix> inputs) {
    if (inputs.empty()) {
        throw dimension_error("flatten_window: empty window");
    }
    const std::size_t n = inputs[0].rows();
    const std::size_t d = inputs[0].cols();
    Matrix out(n, inputs.size() * d);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        if (inputs[t].rows() != n || inputs[t].cols() != d) {
            throw dimension_error("flatten_window: frame shapes differ");
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < d; ++f) {
                out(i, t * d + f) = inputs[t](i, f);
            }
        }
    }
    return out;
}

MlpForward mlp_forward(const MlpBaseline& mlp, std::span<const Matrix> inputs) {
    const MlpConfig& cfg = mlp.config;
    if (inputs.size() != cfg.window || inputs[0].cols() != cfg.n_features) {
        throw dimension_error("mlp_forward: window does not match configuration");
    }
    MlpForward r;
    r.cache.input = flatten_window(inputs);
    r.cache.hidden = activate(Activation::relu, affine_forward(r.cache.input, mlp.w1, mlp.b1));
    r.pred = split_horizon(affine_forward(r.cache.hidden, mlp.w2, mlp.b2), cfg.horizon, cfg.d_out);
    return r;
}

std::vector<Matrix> mlp_predict(const MlpBaseline& mlp, std::span<const Matrix> inputs) {
    return mlp_forward(mlp, inputs).pred;
}

void mlp_backward(MlpBaseline& mlp, const MlpCache& cache, std::span<const Matrix> pred,
                  std::span<const Matrix> targets, double scale) {
    const std::vector<Matrix> grad_pred = loss_gradient(pred, targets, scale);
    const Matrix grad_hidden = affine_backward(cache.hidden, join_horizon(grad_pred), mlp.w2, mlp.b2);
    const Matrix grad_pre =
        hadamard(grad_hidden, activation_derivative(Activation::relu, cache.hidden));
    affine_backward(cache.input, grad_pre, mlp.w1, mlp.b1);
}

double accumulate_gradients(MlpBaseline& mlp, const NormalizedAdjacency&,
                            const WindowSample& sample, double scale) {
    MlpForward r = mlp_forward(mlp, sample.inputs);
    const double value = loss(r.pred, sample.targets);
    mlp_backward(mlp, r.cache, r.pred, sample.targets, scale);
    return value;
}

double sample_loss(const MlpBaseline& mlp, const NormalizedAdjacency&, const WindowSample& sample) {
    return loss(mlp_predict(mlp, sample.inputs), sample.targets);
}

std::vector<Matrix> predict_sample(const MlpBaseline& mlp, const NormalizedAdjacency&,
                                   const WindowSample& sample) {
    return mlp_predict(mlp, sample.inputs);
}

} // namespace stgnn
