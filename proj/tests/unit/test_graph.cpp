#include "stgnn/error.hpp"
#include "stgnn/graph.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace stgnn;
using namespace stgnn::testing;

namespace {

// Largest |eigenvalue| of a symmetric matrix by power iteration.
double spectral_radius(const Matrix& a) {
    RngStream rng(11);
    Matrix v = random_matrix(a.rows(), 1, rng);
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Matrix w = matmul(a, v);
        const double norm = std::sqrt(squared_norm(w));
        if (norm == 0.0) return 0.0;
        lambda = norm / std::sqrt(squared_norm(v));
        v = scale(w, 1.0 / norm);
    }
    return lambda;
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("build_graph canonicalizes edges") {
    CHECK(build_graph(2, {{1, 0, 1.0}}).graph.edges == std::vector<Edge>{{0, 1, 1.0}});
    CHECK(build_graph(2, {{0, 1, 1.0}, {1, 0, 2.0}}).graph.edges == std::vector<Edge>{{0, 1, 3.0}});
    CHECK_THROWS_AS(build_graph(3, {{0, 5, 1.0}}), validation_error);
}

TEST_CASE("build_graph drops and counts self-loops, sorts edges") {
    const auto b = build_graph(4, {{2, 2, 1.0}, {3, 1, 1.0}, {0, 2, 0.5}, {1, 1, 2.0}});
    CHECK(b.dropped_self_loops == 2);
    CHECK(b.graph.edges == std::vector<Edge>{{0, 2, 0.5}, {1, 3, 1.0}});
    CHECK(b.graph.node_ids == std::vector<std::string>{"0", "1", "2", "3"});
}

TEST_CASE("build_graph validates weights and ids") {
    CHECK_THROWS_AS(build_graph(2, {{0, 1, 0.0}}), validation_error);
    CHECK_THROWS_AS(build_graph(2, {{0, 1, -1.0}}), validation_error);
    CHECK_THROWS_AS(build_graph(2, {{0, 1, std::nan("")}}), validation_error);
    CHECK_THROWS_AS(build_graph(2, {}, {"a"}), validation_error);
    CHECK_THROWS_AS(build_graph(2, {}, {"a", "a"}), validation_error);
}

TEST_CASE("normalize small cases") {
    CHECK(normalize(build_graph(1, {}).graph).matrix == Matrix{{1.0}});
    const Matrix two = normalize(build_graph(2, {{0, 1, 1.0}}).graph).matrix;
    CHECK(max_abs_diff(two, Matrix{{0.5, 0.5}, {0.5, 0.5}}) < 1e-15);

    const auto path = build_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}}).graph;
    const Matrix row = normalize(path, NormalizationMode::row).matrix;
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += row(i, j);
        CHECK(s == 1.0);
    }
}

TEST_CASE("normalize properties on random graphs") {
    RngStream rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(7);
        const TopologyGraph g = random_graph(n, rng);
        const Matrix sym = normalize(g).matrix;
        CHECK(max_abs_diff(sym, sym.transpose()) <= 1e-12);
        CHECK(spectral_radius(sym) <= 1.0 + 1e-9);

        const Matrix row = normalize(g, NormalizationMode::row).matrix;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += row(i, j);
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }

        const auto perm = random_permutation(n, rng);
        for (auto mode : {NormalizationMode::symmetric, NormalizationMode::row}) {
            const Matrix base = normalize(g, mode).matrix;
            const Matrix permuted = normalize(permute_graph(g, perm), mode).matrix;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    CHECK(std::abs(permuted(perm[i], perm[j]) - base(i, j)) <= 1e-12);
        }
    }
}

TEST_CASE("permute_graph relabels ids and edges") {
    const auto g = build_graph(3, {{0, 1, 2.0}}, {"a", "b", "c"}).graph;
    const auto p = permute_graph(g, {2, 0, 1});
    CHECK(p.node_ids == std::vector<std::string>{"b", "c", "a"});
    CHECK(p.edges == std::vector<Edge>{{0, 2, 2.0}});
    CHECK_THROWS_AS(permute_graph(g, {0, 0, 1}), validation_error);
    CHECK_THROWS_AS(permute_graph(g, {0, 1}), dimension_error);
}

TEST_CASE("colocation graph connects equal attributes") {
    const auto g = build_colocation_graph({"a", "b", "c", "d"},
                                          {{"a", "rack1"}, {"c", "rack1"}, {"d", "rack1"}, {"b", "rack2"}});
    CHECK(g.edges == std::vector<Edge>{{0, 2, 1.0}, {0, 3, 1.0}, {2, 3, 1.0}});
}

TEST_CASE("json round trip is exact") {
    RngStream rng(5);
    TopologyGraph g = random_graph(6, rng);
    g.node_ids = {"m0", "m1", "x", "y", "z\"q", "w"};
    const std::string text = graph_to_json(g);
    CHECK(graph_from_json(text) == g);
    CHECK(graph_to_json(graph_from_json(text)) == text);
}

TEST_CASE("json parser rejects malformed documents") {
    CHECK_THROWS_AS(graph_from_json("{"), io_error);
    CHECK_THROWS_AS(graph_from_json(R"({"n_nodes": 2, "node_ids": ["a","b"], "edges": [], "x": 1})"),
                    schema_error);
    CHECK_THROWS_AS(graph_from_json(R"({"n_nodes": 2, "node_ids": ["a","b"], "edges": [[0, 1]]})"),
                    schema_error);
    CHECK_THROWS(graph_from_json(R"({"n_nodes": 2, "node_ids": ["a","b"], "edges": [[0, 3, 1.0]]})"));
}

TEST_CASE("file round trip") {
    const auto dir = scratch_dir("graph_file");
    const auto g = build_graph(3, {{0, 1, 1.5}, {1, 2, 0.25}}).graph;
    write_graph(g, dir / "g.json");
    CHECK(read_graph(dir / "g.json") == g);
    CHECK_THROWS_AS(read_graph(dir / "missing.json"), io_error);
}

} // TEST_SUITE
