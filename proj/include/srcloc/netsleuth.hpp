#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

#include "srcloc/graph.hpp"
#include "srcloc/prediction.hpp"
#include "srcloc/spectral.hpp"

namespace srcloc {

// Greedy seed selection by the smallest eigenvector of the Laplacian
// restricted to the still-unclaimed infected nodes, with the number of
// seeds picked by minimum description length.
//
// Cost of k seeds, in bits:
//   L(S)            = log*(k) + log2 C(n, k)
//   L(ripple | S)   = sum over a deterministic greedy ripple of
//                     log2(|frontier|) for each newly claimed node
//   total           = L(S) + lambda_ripple * L(ripple | S)
// where the ripple repeatedly claims the unclaimed infected node with the
// most claimed neighbors (ties: lowest index) and the frontier is the set of
// unclaimed infected nodes adjacent to a claimed one. A ripple that cannot
// reach every infected node costs +inf.
struct NetsleuthConfig {
    // 0 selects max(10, number of infected components), capped at |infected|.
    std::size_t max_seeds = 0;
    double lambda_ripple = 1.0;
    EigenOptions eigen{1e-9, 10000, false};
};

struct MdlReport {
    std::vector<NodeId> seeds_in_order;
    std::vector<double> cost_curve;  // total bits after 1, 2, ... seeds
    std::size_t chosen_k = 0;        // argmin of cost_curve, smallest k on ties
};

struct NetsleuthResult {
    MdlReport mdl;
    Prediction prediction;
};

// Rissanen's universal code length for integers >= 1, in bits.
double log_star(std::size_t k);

double seed_set_bits(std::size_t n, std::size_t k);

// +inf when some infected node cannot be reached from the seeds inside the
// infected subgraph.
double ripple_bits(const Graph& g, const Indicator& infected, const std::vector<NodeId>& seeds);

// Throws Error("infected set not coverable") when every prefix of the seed
// sequence has infinite cost.
NetsleuthResult netsleuth(const Graph& g, const Indicator& infected, const NetsleuthConfig& cfg = {});

nlohmann::ordered_json to_json(const MdlReport& r, const Graph& g);

}  // namespace srcloc
