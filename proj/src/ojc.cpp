#include "srcloc/ojc.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "srcloc/error.hpp"

namespace srcloc {

namespace {

// Ranks a cover: smaller radius first, then fewer unreachable targets.
struct CoverKey {
    NodeId radius = kUnreachable;
    std::size_t unreachable = std::numeric_limits<std::size_t>::max();

    friend bool operator<(const CoverKey& a, const CoverKey& b) {
        return a.radius != b.radius ? a.radius < b.radius : a.unreachable < b.unreachable;
    }
};

CoverKey cover_key(const std::vector<NodeId>& nearest) {
    CoverKey key{0, 0};
    for (NodeId d : nearest) {
        key.radius = std::max(key.radius, d);
        key.unreachable += d == kUnreachable;
    }
    return key;
}

}  // namespace

OjcResult ojc(const Graph& g, const Indicator& infected, std::optional<std::size_t> k) {
    const std::size_t n = g.num_nodes();
    if (infected.size() != n) throw Error("infection vector length does not match graph");
    const auto targets = members_of(infected);
    if (targets.empty()) throw Error("infected set is empty");
    if (k && *k < 1) throw Error("OJC needs k >= 1");

    Indicator is_candidate = infected;
    for (NodeId v : targets) {
        for (NodeId u : g.neighbors(v)) is_candidate[u] = 1;
    }
    const auto candidates = members_of(is_candidate);

    std::size_t want = k ? *k : connected_components(g, infected).count;
    want = std::min(want, candidates.size());

    // dist[c][t]: distance from candidate c to target t, via one BFS per target.
    std::vector<std::vector<NodeId>> dist(candidates.size(), std::vector<NodeId>(targets.size()));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto d = bfs_distances(g, targets[t]);
        for (std::size_t c = 0; c < candidates.size(); ++c) dist[c][t] = d[candidates[c]];
    }

    OjcResult result;
    std::vector<NodeId> nearest(targets.size(), kUnreachable);
    std::vector<std::uint8_t> chosen(candidates.size(), 0);
    std::vector<NodeId> trial(targets.size());
    while (result.centers.size() < want) {
        std::size_t best = candidates.size();
        CoverKey best_key;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (chosen[c]) continue;
            for (std::size_t t = 0; t < targets.size(); ++t) trial[t] = std::min(nearest[t], dist[c][t]);
            const CoverKey key = cover_key(trial);
            if (best == candidates.size() || key < best_key) {
                best = c;
                best_key = key;
            }
        }
        chosen[best] = 1;
        result.centers.push_back(candidates[best]);
        for (std::size_t t = 0; t < targets.size(); ++t) nearest[t] = std::min(nearest[t], dist[best][t]);
    }

    const CoverKey final_key = cover_key(nearest);
    if (final_key.unreachable > 0) {
        throw Error(fmt::format("{} infected node(s) unreachable from every chosen center (k = {})",
                                final_key.unreachable, want));
    }
    result.k = want;
    result.radius = final_key.radius;
    result.prediction = set_prediction(n, result.centers);
    return result;
}

std::size_t jordan_radius(const Graph& g, const Indicator& infected, const std::vector<NodeId>& centers) {
    if (centers.empty()) throw Error("jordan_radius needs at least one center");
    if (infected.size() != g.num_nodes()) throw Error("infection vector length does not match graph");
    const auto d = bfs_distances(g, centers);
    std::size_t radius = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (!infected[v]) continue;
        if (d[v] == kUnreachable) {
            throw Error(fmt::format("infected node {} unreachable from every center", g.label(v)));
        }
        radius = std::max<std::size_t>(radius, d[v]);
    }
    return radius;
}

}  // namespace srcloc
