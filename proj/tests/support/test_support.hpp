#pragma once

#include "stgnn/data.hpp"
#include "stgnn/graph.hpp"
#include "stgnn/matrix.hpp"
#include "stgnn/model.hpp"
#include "stgnn/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stgnn::testing {

inline Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.values()) v = rng.uniform(lo, hi);
    return m;
}

inline WindowSample random_sample(std::size_t n, std::size_t k, std::size_t h, std::size_t d,
                                  std::size_t d_out, RngStream& rng) {
    WindowSample s;
    for (std::size_t t = 0; t < k; ++t) s.inputs.push_back(random_matrix(n, d, rng));
    for (std::size_t t = 0; t < h; ++t) s.targets.push_back(random_matrix(n, d_out, rng));
    return s;
}

/// Random connected-ish graph: a path plus a few random extra edges.
inline TopologyGraph random_graph(std::size_t n, RngStream& rng) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, rng.uniform(0.5, 2.0)});
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t i = rng.below(n), j = rng.below(n);
        if (i != j) edges.push_back({i, j, rng.uniform(0.1, 1.0)});
    }
    return build_graph(n, edges).graph;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

/// Old row i moves to row perm[i].
inline Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t c = 0; c < m.cols(); ++c) out(perm[i], c) = m(i, c);
    }
    return out;
}

inline WindowSample permute_sample(const WindowSample& s, const std::vector<std::size_t>& perm) {
    WindowSample p = s;
    for (auto& x : p.inputs) x = permute_rows(x, perm);
    for (auto& y : p.targets) y = permute_rows(y, perm);
    return p;
}

/// The series for a deterministic tiny run: N nodes of synthetic data.
inline SynthOutput tiny_synth(std::size_t n = 4, std::size_t t = 120, std::uint64_t seed = 7) {
    SynthConfig c;
    c.n_nodes = n;
    c.n_steps = t;
    c.seed = seed;
    return synth_generate(c);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("stgnn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Value 1000·t + 10·i + f, so every entry encodes its position.
inline NodeSeries ramp_series(std::size_t n_steps, std::size_t n_nodes = 2, std::size_t d = 2) {
    NodeSeries s;
    for (std::size_t i = 0; i < n_nodes; ++i) s.node_ids.push_back("n" + std::to_string(i));
    for (std::size_t f = 0; f < d; ++f) s.feature_names.push_back("f" + std::to_string(f));
    s.bin_width = 1.0;
    for (std::size_t t = 0; t < n_steps; ++t) {
        Matrix m(n_nodes, d);
        for (std::size_t i = 0; i < n_nodes; ++i)
            for (std::size_t f = 0; f < d; ++f) m(i, f) = 1000.0 * t + 10.0 * i + f;
        s.values.push_back(m);
    }
    s.missing.assign(n_steps, std::vector<std::uint8_t>(n_nodes, 0));
    return s;
}

// Decodes the step index stored by ramp_series.
inline std::size_t step_of(const Matrix& frame) { return static_cast<std::size_t>(frame(0, 0) / 1000.0); }

struct Enumerated {
    std::size_t t, first_in, last_in, first_target, last_target;
};

/// Every window start t = 0, stride, ... that fits inputs and targets.
inline std::vector<Enumerated> enumerate_windows(std::size_t T, std::size_t k, std::size_t h, std::size_t stride) {
    std::vector<Enumerated> out;
    for (std::size_t t = 0; t < T; t += stride) {
        if (t + k + h <= T) out.push_back({t, t, t + k - 1, t + k, t + k + h - 1});
    }
    return out;
}

} // namespace stgnn::testing
