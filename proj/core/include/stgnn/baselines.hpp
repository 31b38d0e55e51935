#pragma once

#include "stgnn/graph.hpp"
#include "stgnn/model.hpp"
#include "stgnn/parameter.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stgnn {

/// Repeats the last observed frame (first d_out features) at every horizon step.
std::vector<Matrix> persistence_predict(const WindowSample& sample, std::size_t d_out,
                                        std::size_t horizon);
inline std::vector<Matrix> persistence_predict(const WindowSample& sample) {
    return persistence_predict(sample, sample.targets.at(0).cols(), sample.targets.size());
}

struct MlpConfig {
    std::size_t window = 12;
    std::size_t n_features = 3;
    std::size_t hidden = 64;
    std::size_t horizon = 1;
    std::size_t d_out = 1;

    void validate() const;
    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Graph-free per-node MLP: the k·d flattened history of each node goes
/// through affine → relu → affine to h·d_out outputs. Weights are shared
/// across nodes and the adjacency is ignored.
struct MlpBaseline {
    MlpConfig config;
    Parameter w1, b1, w2, b2;

    static MlpBaseline init(const MlpConfig& config, std::uint64_t seed);
    /// Stable names: mlp.{w1,b1,w2,b2}.
    std::vector<NamedParameter> parameters();
};

/// Row i holds node i's history; column t·d + f is feature f at window step t.
Matrix flatten_window(std::span<const Matrix> inputs);

struct MlpCache {
    Matrix input;
    Matrix hidden; // relu output
};

struct MlpForward {
    std::vector<Matrix> pred;
    MlpCache cache;
};

MlpForward mlp_forward(const MlpBaseline& mlp, std::span<const Matrix> inputs);
std::vector<Matrix> mlp_predict(const MlpBaseline& mlp, std::span<const Matrix> inputs);
void mlp_backward(MlpBaseline& mlp, const MlpCache& cache, std::span<const Matrix> pred,
                  std::span<const Matrix> targets, double scale = 1.0);

// Hooks used by the trainer; the adjacency argument is unused.
double accumulate_gradients(MlpBaseline& mlp, const NormalizedAdjacency& adj,
                            const WindowSample& sample, double scale);
double sample_loss(const MlpBaseline& mlp, const NormalizedAdjacency& adj,
                   const WindowSample& sample);
std::vector<Matrix> predict_sample(const MlpBaseline& mlp, const NormalizedAdjacency& adj,
                                   const WindowSample& sample);

} // namespace stgnn
