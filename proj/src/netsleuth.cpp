#include "srcloc/netsleuth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "srcloc/error.hpp"

namespace srcloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Normalizing constant of the universal integer prior.
constexpr double kLogStarConstant = 2.865064;

}  // namespace

double log_star(std::size_t k) {
    if (k < 1) throw Error("log* is defined for integers >= 1");
    double bits = std::log2(kLogStarConstant);
    for (double term = std::log2(static_cast<double>(k)); term > 0.0; term = std::log2(term)) {
        bits += term;
    }
    return bits;
}

double seed_set_bits(std::size_t n, std::size_t k) {
    if (k < 1 || k > n) throw Error(fmt::format("seed count {} outside [1, {}]", k, n));
    const double ln_choose = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                             std::lgamma(double(n - k) + 1);
    return log_star(k) + std::max(0.0, ln_choose / std::numbers::ln2);
}

double ripple_bits(const Graph& g, const Indicator& infected, const std::vector<NodeId>& seeds) {
    const std::size_t n = g.num_nodes();
    Indicator claimed(n, 0);
    std::vector<std::uint32_t> claimed_nbrs(n, 0);
    // Frontier ordered by (most claimed neighbors, lowest index).
    std::set<std::pair<std::int64_t, NodeId>> frontier;
    std::size_t remaining = count_of(infected);

    auto claim = [&](NodeId v) {
        claimed[v] = 1;
        --remaining;
        for (NodeId u : g.neighbors(v)) {
            if (!infected[u] || claimed[u]) continue;
            if (claimed_nbrs[u] > 0) frontier.erase({-std::int64_t(claimed_nbrs[u]), u});
            ++claimed_nbrs[u];
            frontier.insert({-std::int64_t(claimed_nbrs[u]), u});
        }
    };

    for (NodeId s : seeds) {
        if (!infected[s]) throw Error(fmt::format("seed {} is not infected", s));
        if (claimed[s]) continue;
        if (claimed_nbrs[s] > 0) frontier.erase({-std::int64_t(claimed_nbrs[s]), s});
        claim(s);
    }

    double bits = 0.0;
    while (remaining > 0) {
        if (frontier.empty()) return kInf;
        bits += std::log2(static_cast<double>(frontier.size()));
        const NodeId next = frontier.begin()->second;
        frontier.erase(frontier.begin());
        claim(next);
    }
    return bits;
}

NetsleuthResult netsleuth(const Graph& g, const Indicator& infected, const NetsleuthConfig& cfg) {
    const std::size_t n = g.num_nodes();
    if (infected.size() != n) throw Error("infection vector length does not match graph");
    const std::size_t num_infected = count_of(infected);
    if (num_infected == 0) throw Error("infected set is empty");
    if (num_infected > kMaxDenseInfected) {
        throw Error(fmt::format("NetSleuth refuses {} infected nodes (limit {})", num_infected,
                                kMaxDenseInfected));
    }

    std::size_t max_seeds = cfg.max_seeds;
    if (max_seeds == 0) max_seeds = std::max<std::size_t>(10, connected_components(g, infected).count);
    max_seeds = std::min(max_seeds, num_infected);

    NetsleuthResult result;
    MdlReport& mdl = result.mdl;
    std::vector<NodeId> unclaimed = members_of(infected);

    while (mdl.seeds_in_order.size() < max_seeds) {
        const auto sub = laplacian_submatrix(g, unclaimed);
        const auto eig = smallest_eigvec(sub.matrix, cfg.eigen);
        // Lowest index among entries within rounding of the maximum.
        const double top = eig.vector.maxCoeff();
        const double slack = 1e-10 * std::max(1.0, std::abs(top));
        Eigen::Index pick = 0;
        while (eig.vector[pick] < top - slack) ++pick;

        const NodeId seed = sub.nodes[static_cast<std::size_t>(pick)];
        mdl.seeds_in_order.push_back(seed);
        unclaimed.erase(unclaimed.begin() + pick);

        const double ripple = ripple_bits(g, infected, mdl.seeds_in_order);
        const double cost = std::isinf(ripple)
                                ? kInf
                                : seed_set_bits(n, mdl.seeds_in_order.size()) + cfg.lambda_ripple * ripple;
        mdl.cost_curve.push_back(cost);
    }

    auto best = std::min_element(mdl.cost_curve.begin(), mdl.cost_curve.end());
    if (std::isinf(*best)) throw Error("infected set not coverable");
    mdl.chosen_k = static_cast<std::size_t>(best - mdl.cost_curve.begin()) + 1;

    std::vector<NodeId> chosen(mdl.seeds_in_order.begin(),
                               mdl.seeds_in_order.begin() + static_cast<std::ptrdiff_t>(mdl.chosen_k));
    result.prediction = set_prediction(n, chosen);
    return result;
}

nlohmann::ordered_json to_json(const MdlReport& r, const Graph& g) {
    nlohmann::ordered_json j;
    auto seeds = nlohmann::ordered_json::array();
    for (NodeId v : r.seeds_in_order) seeds.push_back(g.label(v));
    auto costs = nlohmann::ordered_json::array();
    for (double c : r.cost_curve) {
        if (std::isinf(c)) {
            costs.push_back(nullptr);
        } else {
            costs.push_back(c);
        }
    }
    j["seeds_in_order"] = std::move(seeds);
    j["cost_curve"] = std::move(costs);
    j["chosen_k"] = r.chosen_k;
    return j;
}

}  // namespace srcloc
