#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace srcloc {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// Distance reported by bfs_distances for nodes the source cannot reach.
inline constexpr NodeId kUnreachable = std::numeric_limits<NodeId>::max();

// Binary per-node indicator (seed sets, infection sets, decisions).
using Indicator = std::vector<std::uint8_t>;

// Immutable undirected, unweighted graph in CSR form.
//
// Every undirected edge {u, v} is stored twice (in u's and in v's list) and
// both copies carry the same canonical edge id in [0, m). Neighbor lists are
// sorted ascending with no duplicates and no self-loops. Original node labels
// are kept so that files can be written back in the caller's vocabulary.
class Graph {
public:
    Graph() = default;

    // Builds a graph over nodes 0..n-1 labelled "0".."n-1". Self-loops and
    // duplicate edges are dropped; endpoints must be < n.
    static Graph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    // Builds a graph from already-interned edges, keeping the given labels.
    static Graph from_labeled_edges(std::vector<std::string> labels,
                                    std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t num_nodes() const noexcept { return labels_.size(); }
    std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

    std::size_t degree(NodeId v) const noexcept {
        return row_offsets_[v + 1] - row_offsets_[v];
    }

    std::span<const NodeId> neighbors(NodeId v) const noexcept {
        return {neighbors_.data() + row_offsets_[v], degree(v)};
    }

    // Edge ids parallel to neighbors(v).
    std::span<const EdgeId> incident_edges(NodeId v) const noexcept {
        return {edge_ids_.data() + row_offsets_[v], degree(v)};
    }

    // Endpoints (lo, hi) of each canonical edge id.
    std::span<const std::pair<NodeId, NodeId>> edges() const noexcept { return endpoints_; }

    bool has_edge(NodeId u, NodeId v) const noexcept;

    const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
    const std::vector<NodeId>& adjacency() const noexcept { return neighbors_; }
    const std::vector<EdgeId>& edge_ids() const noexcept { return edge_ids_; }

    const std::string& label(NodeId v) const { return labels_.at(v); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    // Internal index of an original label; throws srcloc::Error if unknown.
    NodeId index_of(std::string_view label) const;
    bool contains_label(std::string_view label) const;

private:
    std::vector<std::size_t> row_offsets_{0};
    std::vector<NodeId> neighbors_;
    std::vector<EdgeId> edge_ids_;
    std::vector<std::pair<NodeId, NodeId>> endpoints_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> index_;
};

struct EdgeListParse {
    Graph graph;
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
};

// Reads whitespace-separated label pairs, one per line. Blank lines and lines
// whose first non-blank character is '#' are skipped. Labels are interned in
// first-appearance order. Throws ParseError on malformed lines and Error on an
// edgeless input.
EdgeListParse parse_edge_list(std::istream& in);
EdgeListParse parse_edge_list(std::string_view text);
EdgeListParse load_edge_list(const std::string& path);

// Zachary's karate club (34 nodes, 78 edges), labels "0".."33".
Graph builtin_karate();
std::string_view karate_edge_list_text();

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double avg_degree = 0.0;  // full precision; round for display only
};

GraphStats graph_stats(const Graph& g);

// "34 nodes, 78 edges, avg degree 4.588"
std::string format_stats(const GraphStats& s);

std::vector<NodeId> bfs_distances(const Graph& g, NodeId source);

// Multi-source variant: distance to the nearest source.
std::vector<NodeId> bfs_distances(const Graph& g, std::span<const NodeId> sources);

// Labels in [0, count), numbered in order of their smallest node.
struct Components {
    std::vector<NodeId> label;
    std::size_t count = 0;
};

Components connected_components(const Graph& g);

// Components of the subgraph induced by `mask`; nodes outside the mask get
// kUnreachable as their label.
Components connected_components(const Graph& g, const Indicator& mask);

Indicator make_indicator(std::size_t n, std::span<const NodeId> members);
std::vector<NodeId> members_of(const Indicator& ind);
std::size_t count_of(const Indicator& ind);
// a ⊆ b, elementwise; sizes must match.
bool is_subset(const Indicator& a, const Indicator& b);

// Graph with node v renamed to perm[v] (labels travel with their nodes).
Graph permute(const Graph& g, std::span<const NodeId> perm);

}  // namespace srcloc
