#pragma once

#include "stgnn/matrix.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace stgnn {

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted system graph. Edges are stored once with i < j,
/// sorted by (i, j), without self-loops or duplicates.
struct TopologyGraph {
    std::size_t n_nodes = 0;
    std::vector<Edge> edges;
    std::vector<std::string> node_ids;

    friend bool operator==(const TopologyGraph&, const TopologyGraph&) = default;
};

struct GraphBuild {
    TopologyGraph graph;
    std::size_t dropped_self_loops = 0;
};

/// Canonicalizes a raw edge list: orders each pair as i < j, merges
/// duplicates by summing weights and drops self-loops (counted in the
/// result). An empty `node_ids` yields ids "0".."N-1".
GraphBuild build_graph(std::size_t n_nodes, const std::vector<Edge>& raw_edges,
                       std::vector<std::string> node_ids = {});

enum class NormalizationMode { symmetric, row };

struct NormalizedAdjacency {
    std::size_t n_nodes = 0;
    NormalizationMode mode = NormalizationMode::symmetric;
    Matrix matrix;
};

/// Â = A + I, then D̂^(-1/2) Â D̂^(-1/2) (symmetric) or D̂^(-1) Â (row).
NormalizedAdjacency normalize(const TopologyGraph& g,
                              NormalizationMode mode = NormalizationMode::symmetric);

/// Relabels nodes so that old node i becomes new node perm[i].
TopologyGraph permute_graph(const TopologyGraph& g, const std::vector<std::size_t>& perm);

/// Connects every pair of nodes that share the same attribute value
/// (rack, platform, switch domain) with unit weight. Nodes absent from
/// the attribute map stay isolated.
TopologyGraph build_colocation_graph(const std::vector<std::string>& node_ids,
                                     const std::vector<std::pair<std::string, std::string>>& attributes);

/// `{"n_nodes": int, "node_ids": [string], "edges": [[i, j, weight]]}`
std::string graph_to_json(const TopologyGraph& g);
TopologyGraph graph_from_json(const std::string& text);
void write_graph(const TopologyGraph& g, const std::filesystem::path& path);
TopologyGraph read_graph(const std::filesystem::path& path);

std::string to_string(NormalizationMode mode);
NormalizationMode normalization_from_string(const std::string& name);

} // namespace stgnn
