#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "srcloc/graph.hpp"
#include "srcloc/prediction.hpp"

namespace srcloc {

// Jordan cover over a fully observed cascade. Candidates are the infected
// nodes and their neighbors, so a center may be an uninfected neighbor.
struct OjcResult {
    Prediction prediction;  // scores are 1 for centers, 0 elsewhere
    std::vector<NodeId> centers;  // in selection order
    std::size_t k = 0;
    std::size_t radius = 0;
};

// Greedy k-center: the first center is the Jordan center of the infected
// set; each further center is the candidate that minimizes the resulting
// cover radius (ties: lowest index). With k unset, k is the number of
// connected components of the infected subgraph. While some infected node
// is still unreachable, candidates are ranked by how many infected nodes
// they leave unreachable. Throws if the final cover leaves an infected node
// unreachable.
OjcResult ojc(const Graph& g, const Indicator& infected, std::optional<std::size_t> k = std::nullopt);

// max over infected v of min over centers c of dist(c, v).
std::size_t jordan_radius(const Graph& g, const Indicator& infected, const std::vector<NodeId>& centers);

}  // namespace srcloc
