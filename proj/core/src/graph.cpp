#include "stgnn/graph.hpp"

#include "stgnn/error.hpp"
#include "stgnn/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace stgnn {

using nlohmann::json;

GraphBuild build_graph(std::size_t n_nodes, const std::vector<Edge>& raw_edges,
                       std::vector<std::string> node_ids) {
    if (node_ids.empty()) {
        node_ids.reserve(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            node_ids.push_back(std::to_string(i));
        }
    }
    if (node_ids.size() != n_nodes) {
        throw validation_error("build_graph: " + std::to_string(node_ids.size()) +
                               " node ids for " + std::to_string(n_nodes) + " nodes");
    }
    if (std::set<std::string>(node_ids.begin(), node_ids.end()).size() != n_nodes) {
        throw validation_error("build_graph: duplicate node id");
    }

    GraphBuild out;
    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    for (const Edge& e : raw_edges) {
        if (e.i >= n_nodes || e.j >= n_nodes) {
            throw validation_error("build_graph: edge (" + std::to_string(e.i) + "," +
                                   std::to_string(e.j) + ") out of range for " +
                                   std::to_string(n_nodes) + " nodes");
        }
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw validation_error("build_graph: edge (" + std::to_string(e.i) + "," +
                                   std::to_string(e.j) + ") has non-positive weight");
        }
        if (e.i == e.j) {
            ++out.dropped_self_loops;
            continue;
        }
        merged[{std::min(e.i, e.j), std::max(e.i, e.j)}] += e.weight;
    }

    out.graph.n_nodes = n_nodes;
    out.graph.node_ids = std::move(node_ids);
    out.graph.edges.reserve(merged.size());
    for (const auto& [key, w] : merged) {
        out.graph.edges.push_back({key.first, key.second, w});
    }
    return out;
}

NormalizedAdjacency normalize(const TopologyGraph& g, NormalizationMode mode) {
    if (g.n_nodes == 0) {
        throw validation_error("normalize: graph has no nodes");
    }
    const std::size_t n = g.n_nodes;
    Matrix a = Matrix::identity(n);
    for (const Edge& e : g.edges) {
        a(e.i, e.j) += e.weight;
        a(e.j, e.i) += e.weight;
    }
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            degree[i] += a(i, j);
        }
    }

    NormalizedAdjacency out{n, mode, Matrix(n, n)};
    if (mode == NormalizationMode::symmetric) {
        std::vector<double> inv_sqrt(n);
        for (std::size_t i = 0; i < n; ++i) {
            inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                out.matrix(i, j) = a(i, j) * inv_sqrt[i] * inv_sqrt[j];
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                out.matrix(i, j) = a(i, j) / degree[i];
            }
        }
    }
    return out;
}

TopologyGraph permute_graph(const TopologyGraph& g, const std::vector<std::size_t>& perm) {
    if (perm.size() != g.n_nodes) {
        throw dimension_error("permute_graph: permutation size does not match node count");
    }
    std::vector<bool> seen(g.n_nodes, false);
    for (std::size_t p : perm) {
        if (p >= g.n_nodes || seen[p]) {
            throw validation_error("permute_graph: not a permutation");
        }
        seen[p] = true;
    }
    std::vector<std::string> ids(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        ids[perm[i]] = g.node_ids[i];
    }
    std::vector<Edge> edges;
    edges.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
        edges.push_back({perm[e.i], perm[e.j], e.weight});
    }
    return build_graph(g.n_nodes, edges, std::move(ids)).graph;
}

TopologyGraph build_colocation_graph(
    const std::vector<std::string>& node_ids,
    const std::vector<std::pair<std::string, std::string>>& attributes) {
    std::map<std::string, std::string> attr_of;
    for (const auto& [id, value] : attributes) {
        attr_of[id] = value;
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        auto it = attr_of.find(node_ids[i]);
        if (it != attr_of.end() && !it->second.empty()) {
            groups[it->second].push_back(i);
        }
    }
    std::vector<Edge> edges;
    for (const auto& [value, members] : groups) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                edges.push_back({members[a], members[b], 1.0});
            }
        }
    }
    return build_graph(node_ids.size(), edges, node_ids).graph;
}

std::string graph_to_json(const TopologyGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges) {
        edges.push_back(json::array({e.i, e.j, e.weight}));
    }
    json doc;
    doc["n_nodes"] = g.n_nodes;
    doc["node_ids"] = g.node_ids;
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

TopologyGraph graph_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw io_error(std::string("graph file: ") + e.what());
    }
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key != "n_nodes" && key != "node_ids" && key != "edges") {
                throw schema_error("graph file: unknown key '" + key + "'");
            }
        }
        const auto n = doc.at("n_nodes").get<std::size_t>();
        auto ids = doc.at("node_ids").get<std::vector<std::string>>();
        std::vector<Edge> edges;
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 3) {
                throw schema_error("graph file: each edge must be [i, j, weight]");
            }
            edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
        }
        if (ids.size() != n) {
            throw validation_error("graph file: node_ids length does not match n_nodes");
        }
        return build_graph(n, edges, std::move(ids)).graph;
    } catch (const json::exception& e) {
        throw schema_error(std::string("graph file: ") + e.what());
    }
}

void write_graph(const TopologyGraph& g, const std::filesystem::path& path) {
    atomic_write(path, graph_to_json(g));
}

TopologyGraph read_graph(const std::filesystem::path& path) {
    return graph_from_json(read_file(path));
}

std::string to_string(NormalizationMode mode) {
    return mode == NormalizationMode::symmetric ? "symmetric" : "row";
}

NormalizationMode normalization_from_string(const std::string& name) {
    if (name == "symmetric") return NormalizationMode::symmetric;
    if (name == "row") return NormalizationMode::row;
    throw config_error("unknown normalization '" + name + "' (expected symmetric or row)");
}

} // namespace stgnn
