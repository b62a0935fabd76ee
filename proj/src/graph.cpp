#include "srcloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "srcloc/error.hpp"

namespace srcloc {

namespace {

// Normalizes to (lo, hi), drops self-loops and duplicates, and returns the
// canonical sorted edge list. Counters report what was dropped.
std::vector<std::pair<NodeId, NodeId>> canonical_edges(
    std::span<const std::pair<NodeId, NodeId>> edges, std::size_t* dup_count,
    std::size_t* loop_count) {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edges.size());
    std::size_t loops = 0;
    for (auto [u, v] : edges) {
        if (u == v) {
            ++loops;
            continue;
        }
        out.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(out.begin(), out.end());
    auto last = std::unique(out.begin(), out.end());
    std::size_t dups = static_cast<std::size_t>(out.end() - last);
    out.erase(last, out.end());
    if (dup_count) *dup_count = dups;
    if (loop_count) *loop_count = loops;
    return out;
}

}  // namespace

Graph Graph::from_labeled_edges(std::vector<std::string> labels,
                                std::span<const std::pair<NodeId, NodeId>> edges) {
    const std::size_t n = labels.size();
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) {
            throw Error(fmt::format("edge ({}, {}) references a node outside 0..{}", u, v,
                                    n == 0 ? 0 : n - 1));
        }
    }

    Graph g;
    g.endpoints_ = canonical_edges(edges, nullptr, nullptr);
    const std::size_t m = g.endpoints_.size();

    g.row_offsets_.assign(n + 1, 0);
    for (auto [u, v] : g.endpoints_) {
        ++g.row_offsets_[u + 1];
        ++g.row_offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.row_offsets_[i + 1] += g.row_offsets_[i];

    g.neighbors_.resize(2 * m);
    g.edge_ids_.resize(2 * m);
    std::vector<std::size_t> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
    // Edges are sorted by (lo, hi), so filling in id order leaves every list
    // sorted: edges (lo, u) precede edges (u, hi).
    for (EdgeId e = 0; e < m; ++e) {
        auto [u, v] = g.endpoints_[e];
        g.neighbors_[cursor[u]] = v;
        g.edge_ids_[cursor[u]++] = e;
        g.neighbors_[cursor[v]] = u;
        g.edge_ids_[cursor[v]++] = e;
    }

    g.labels_ = std::move(labels);
    g.index_.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
        if (!g.index_.emplace(g.labels_[v], v).second) {
            throw Error(fmt::format("duplicate node label '{}'", g.labels_[v]));
        }
    }
    return g;
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return from_labeled_edges(std::move(labels), edges);
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
    if (u >= num_nodes() || v >= num_nodes()) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

NodeId Graph::index_of(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) throw Error(fmt::format("unknown node label '{}'", label));
    return it->second;
}

bool Graph::contains_label(std::string_view label) const {
    return index_.count(std::string(label)) != 0;
}

EdgeListParse parse_edge_list(std::istream& in) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> index;
    std::vector<std::pair<NodeId, NodeId>> raw;

    auto intern = [&](const std::string& s) {
        auto [it, inserted] = index.emplace(s, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(s);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;  // blank
        if (a.front() == '#') continue;
        if (!(ls >> b)) throw ParseError(lineno, "expected two node labels, found one");
        if (ls >> extra) {
            throw ParseError(lineno, "expected two node labels, found more than two");
        }
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        raw.emplace_back(u, v);
    }

    EdgeListParse result;
    auto canon = canonical_edges(raw, &result.duplicate_edges, &result.self_loops);
    if (canon.empty()) throw Error("edge list contains no edges");
    result.graph = Graph::from_labeled_edges(std::move(labels), canon);
    return result;
}

EdgeListParse parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_edge_list(in);
}

EdgeListParse load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open edge list '{}'", path));
    return parse_edge_list(in);
}

GraphStats graph_stats(const Graph& g) {
    GraphStats s;
    s.nodes = g.num_nodes();
    s.edges = g.num_edges();
    s.avg_degree = s.nodes == 0 ? 0.0 : 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
    return s;
}

std::string format_stats(const GraphStats& s) {
    return fmt::format("{} nodes, {} edges, avg degree {:.3f}", s.nodes, s.edges, s.avg_degree);
}

std::vector<NodeId> bfs_distances(const Graph& g, std::span<const NodeId> sources) {
    std::vector<NodeId> dist(g.num_nodes(), kUnreachable);
    std::deque<NodeId> queue;
    for (NodeId s : sources) {
        if (s >= g.num_nodes()) {
            throw Error(fmt::format("BFS source {} out of range (n = {})", s, g.num_nodes()));
        }
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::vector<NodeId> bfs_distances(const Graph& g, NodeId source) {
    return bfs_distances(g, std::span<const NodeId>(&source, 1));
}

Components connected_components(const Graph& g, const Indicator& mask) {
    const std::size_t n = g.num_nodes();
    if (mask.size() != n) throw Error("component mask size does not match graph");
    Components cc;
    cc.label.assign(n, kUnreachable);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (!mask[s] || cc.label[s] != kUnreachable) continue;
        const auto id = static_cast<NodeId>(cc.count++);
        cc.label[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(u)) {
                if (mask[v] && cc.label[v] == kUnreachable) {
                    cc.label[v] = id;
                    stack.push_back(v);
                }
            }
        }
    }
    return cc;
}

Components connected_components(const Graph& g) {
    return connected_components(g, Indicator(g.num_nodes(), 1));
}

Indicator make_indicator(std::size_t n, std::span<const NodeId> members) {
    Indicator ind(n, 0);
    for (NodeId v : members) {
        if (v >= n) throw Error(fmt::format("node {} out of range (n = {})", v, n));
        ind[v] = 1;
    }
    return ind;
}

std::vector<NodeId> members_of(const Indicator& ind) {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < ind.size(); ++v) {
        if (ind[v]) out.push_back(v);
    }
    return out;
}

std::size_t count_of(const Indicator& ind) {
    return static_cast<std::size_t>(std::count_if(ind.begin(), ind.end(), [](auto x) { return x != 0; }));
}

bool is_subset(const Indicator& a, const Indicator& b) {
    if (a.size() != b.size()) throw Error("indicator sizes differ");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

Graph permute(const Graph& g, std::span<const NodeId> perm) {
    const std::size_t n = g.num_nodes();
    if (perm.size() != n) throw Error("permutation size does not match graph");
    std::vector<std::string> labels(n);
    for (NodeId v = 0; v < n; ++v) labels.at(perm[v]) = g.label(v);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(g.num_edges());
    for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
    return Graph::from_labeled_edges(std::move(labels), edges);
}

}  // namespace srcloc
