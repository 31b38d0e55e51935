#include "stgnn/graph.hpp"
#include "stgnn/layers.hpp"
#include "stgnn/model.hpp"
#include "stgnn/rng.hpp"

#include <benchmark/benchmark.h>

using namespace stgnn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
    return m;
}

NormalizedAdjacency ring(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    return normalize(build_graph(n, edges).graph);
}

WindowSample sample(std::size_t n, const ModelConfig& c, RngStream& rng) {
    WindowSample s;
    for (std::size_t t = 0; t < c.window; ++t) s.inputs.push_back(random_matrix(n, c.n_features, rng));
    for (std::size_t t = 0; t < c.horizon; ++t) s.targets.push_back(random_matrix(n, c.d_out, rng));
    return s;
}

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(1);
    const Matrix a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_matmul)->Arg(16)->Arg(64)->Arg(256);

void BM_gcn_forward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(2);
    const auto adj = ring(n);
    const GcnLayer layer = GcnLayer::init(16, 16, Activation::relu, rng);
    const Matrix h = random_matrix(n, 16, rng);
    for (auto _ : state) benchmark::DoNotOptimize(gcn_forward(adj, h, layer));
}
BENCHMARK(BM_gcn_forward)->Arg(20)->Arg(100);

void BM_gru_step(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(3);
    const GruCell cell = GruCell::init(16, 16, rng);
    const Matrix x = random_matrix(n, 16, rng), h = random_matrix(n, 16, rng);
    for (auto _ : state) benchmark::DoNotOptimize(gru_step(x, h, cell));
}
BENCHMARK(BM_gru_step)->Arg(20)->Arg(100);

void BM_forward_backward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(4);
    ModelConfig c;
    StgnnModel m = StgnnModel::init(c, 5);
    const auto adj = ring(n);
    const auto s = sample(n, c, rng);
    for (auto _ : state) {
        zero_grads(m.parameters());
        benchmark::DoNotOptimize(accumulate_gradients(m, adj, s, 1.0));
    }
}
BENCHMARK(BM_forward_backward)->Arg(20)->Arg(100);

void BM_predict(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(6);
    ModelConfig c;
    const StgnnModel m = StgnnModel::init(c, 7);
    const auto adj = ring(n);
    const auto s = sample(n, c, rng);
    for (auto _ : state) benchmark::DoNotOptimize(predict(m, adj, s.inputs));
}
BENCHMARK(BM_predict)->Arg(20)->Arg(100);

} // namespace

// Own main: the distro benchmark_main archive carries LTO bytecode from another gcc.
BENCHMARK_MAIN();
