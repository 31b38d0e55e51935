#pragma once

#include "stgnn/graph.hpp"
#include "stgnn/layers.hpp"
#include "stgnn/matrix.hpp"
#include "stgnn/parameter.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stgnn {

struct ModelConfig {
    std::size_t n_features = 3;
    std::size_t d_hidden_gcn = 16;
    std::size_t n_gcn_layers = 2;
    std::size_t d_hidden_gru = 16;
    std::size_t horizon = 1;
    std::size_t d_out = 1;
    std::size_t window = 12;
    Activation gcn_activation = Activation::relu;
    NormalizationMode normalization = NormalizationMode::symmetric;
    /// Feeds the last step's GCN output to the decoder next to the GRU state.
    bool fuse_concat_last_gcn = false;

    /// Throws config_error when a count is zero, depth exceeds 6 or d_out > n_features.
    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// One training pair: `window` input frames (N × d) followed by `horizon`
/// target frames (N × d_out). Targets are the first d_out features.
struct WindowSample {
    std::vector<Matrix> inputs;
    std::vector<Matrix> targets;
    std::size_t t_origin = 0;
};

struct StgnnModel {
    ModelConfig config;
    std::vector<GcnLayer> gcn_stack;
    GruCell gru;
    Decoder decoder;

    /// Glorot-uniform weights drawn from RngStream(seed) in the order
    /// GCN layers, GRU (W_z, W_r, W_h, U_z, U_r, U_h), decoder; zero decoder bias.
    static StgnnModel init(const ModelConfig& config, std::uint64_t seed);

    /// Stable names: gcn.<l>.w, gru.{w_z,w_r,w_h,u_z,u_r,u_h}, decoder.{w,b}.
    std::vector<NamedParameter> parameters();
    std::size_t n_parameters() const;
};

struct StgnnCache {
    std::vector<std::vector<GcnCache>> gcn; // [step][layer]
    std::vector<GruCache> gru;              // [step]
    Matrix fused;                           // decoder input
};

struct ForwardResult {
    std::vector<Matrix> pred; // horizon frames, N × d_out
    StgnnCache cache;
};

ForwardResult forward(const StgnnModel& model, const NormalizedAdjacency& adj,
                      std::span<const Matrix> inputs);
ForwardResult forward(const StgnnModel& model, const NormalizedAdjacency& adj,
                      const WindowSample& sample);

std::vector<Matrix> predict(const StgnnModel& model, const NormalizedAdjacency& adj,
                            std::span<const Matrix> recent_window);

/// Mean squared error over every entry of every horizon frame.
double loss(std::span<const Matrix> pred, std::span<const Matrix> targets);

/// d(loss)/d(pred) scaled by `scale`.
std::vector<Matrix> loss_gradient(std::span<const Matrix> pred, std::span<const Matrix> targets,
                                  double scale = 1.0);

/// Accumulates the exact gradient of scale · loss(pred, targets) into every
/// parameter, backpropagating through all window steps.
void backward(StgnnModel& model, const NormalizedAdjacency& adj, const StgnnCache& cache,
              std::span<const Matrix> pred, std::span<const Matrix> targets, double scale = 1.0);

/// Forward + backward for one sample; returns the unscaled loss.
double accumulate_gradients(StgnnModel& model, const NormalizedAdjacency& adj,
                            const WindowSample& sample, double scale);
double sample_loss(const StgnnModel& model, const NormalizedAdjacency& adj,
                   const WindowSample& sample);
std::vector<Matrix> predict_sample(const StgnnModel& model, const NormalizedAdjacency& adj,
                                   const WindowSample& sample);

/// Splits a decoder output (N × h·d_out) into h frames of N × d_out.
std::vector<Matrix> split_horizon(const Matrix& decoded, std::size_t horizon, std::size_t d_out);
Matrix join_horizon(std::span<const Matrix> frames);

} // namespace stgnn
