#pragma once

// Toy graphs and independent reference implementations shared by the unit
// and acceptance suites. Nothing here calls into the code it is used to
// check, except to build Graph objects.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "srcloc/graph.hpp"

namespace srcloc::testing {

using Edges = std::vector<std::pair<NodeId, NodeId>>;

inline Graph path_graph(std::size_t n) {
    Edges e;
    for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph::from_edges(n, e);
}

inline Graph star_graph(std::size_t leaves) {
    Edges e;
    for (NodeId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return Graph::from_edges(leaves + 1, e);
}

inline Graph triangle() { return Graph::from_edges(3, Edges{{0, 1}, {1, 2}, {0, 2}}); }

inline Graph two_triangles() {
    return Graph::from_edges(6, Edges{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

inline Graph cycle_graph(std::size_t n) {
    Edges e;
    for (NodeId i = 0; i < n; ++i) e.emplace_back(i, static_cast<NodeId>((i + 1) % n));
    return Graph::from_edges(n, e);
}

inline Graph complete_graph(std::size_t n) {
    Edges e;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph::from_edges(n, e);
}

// Connected Erdos-Renyi-style graph: a random spanning tree plus extra edges.
inline Graph random_connected(std::size_t n, double extra_p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Edges e;
    for (NodeId v = 1; v < n; ++v) {
        std::uniform_int_distribution<NodeId> pick(0, v - 1);
        e.emplace_back(pick(rng), v);
    }
    std::bernoulli_distribution coin(extra_p);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (coin(rng)) e.emplace_back(u, v);
    return Graph::from_edges(n, e);
}

inline Indicator all_nodes(const Graph& g) { return Indicator(g.num_nodes(), 1); }

inline Indicator nodes(std::size_t n, std::initializer_list<NodeId> members) {
    Indicator ind(n, 0);
    for (NodeId v : members) ind[v] = 1;
    return ind;
}

// O(P*N) pairwise AUC with ties counted half.
inline double brute_force_auc(const std::vector<double>& scores, const Indicator& truth) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!truth[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (truth[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Textbook round-based IC with one attempt per newly activated node and
// neighbor, driven by a sequential std::mt19937_64 stream.
inline std::vector<std::uint8_t> round_based_ic(const Graph& g, const std::vector<NodeId>& seeds, double p,
                                                std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::uint8_t> active(g.num_nodes(), 0);
    std::vector<NodeId> frontier;
    for (NodeId s : seeds) {
        active[s] = 1;
        frontier.push_back(s);
    }
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            for (NodeId v : g.neighbors(u)) {
                if (!active[v] && coin(rng)) {
                    active[v] = 1;
                    next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    return active;
}

inline std::vector<std::vector<NodeId>> all_pairs_distances(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<NodeId>> d(n, std::vector<NodeId>(n, kUnreachable));
    for (NodeId s = 0; s < n; ++s) {
        std::queue<NodeId> q;
        d[s][s] = 0;
        q.push(s);
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : g.neighbors(u)) {
                if (d[s][v] == kUnreachable) {
                    d[s][v] = d[s][u] + 1;
                    q.push(v);
                }
            }
        }
    }
    return d;
}

// Optimal k-center radius over the given candidates by exhaustive search.
inline NodeId brute_force_k_center(const std::vector<std::vector<NodeId>>& dist, const std::vector<NodeId>& targets,
                                   const std::vector<NodeId>& candidates, std::size_t k) {
    NodeId best = kUnreachable;
    std::vector<std::size_t> pick(k);
    // Enumerate k-combinations of candidate indices in lexicographic order.
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    if (k > candidates.size()) return best;
    while (true) {
        NodeId radius = 0;
        for (NodeId t : targets) {
            NodeId nearest = kUnreachable;
            for (std::size_t i : pick) nearest = std::min(nearest, dist[candidates[i]][t]);
            radius = std::max(radius, nearest);
        }
        best = std::min(best, radius);
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == candidates.size() - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

// Fresh scratch directory under $SRCLOC_TMP (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* env = std::getenv("SRCLOC_TMP");
    std::filesystem::path root = env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "srcloc";
    auto dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace srcloc::testing
