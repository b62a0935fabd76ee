#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "srcloc/graph.hpp"
#include "srcloc/hash.hpp"

namespace srcloc {

enum class ModelKind {
    IC,
    LT,
    // Pairs loaded from files that carry no model description.
    Unknown,
};

struct DiffusionModel {
    ModelKind kind = ModelKind::IC;
    double ic_p = 0.1;  // uniform edge activation probability, IC only

    static DiffusionModel ic(double p) { return {ModelKind::IC, p}; }
    static DiffusionModel lt() { return {ModelKind::LT, 0.0}; }

    // Throws Error unless the active kind's parameters are valid.
    void validate() const;

    friend bool operator==(const DiffusionModel& a, const DiffusionModel& b) {
        return a.kind == b.kind && (a.kind != ModelKind::IC || a.ic_p == b.ic_p);
    }
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

// One simulated (or observed) cascade: seeds ⊆ infected, at least one seed.
struct SeedDiffusionPair {
    Indicator seeds;
    Indicator infected;
    DiffusionModel model;
    RunKey run_key;

    friend bool operator==(const SeedDiffusionPair&, const SeedDiffusionPair&) = default;
};

// Independent Cascade with one coin per undirected edge: edge e is live iff
// uniform(key, e) < p, and the infected set is everything reachable from the
// seeds over live edges.
Indicator simulate_ic(const Graph& g, const Indicator& seeds, double p, RunKey key);

// Linear Threshold with weights 1/deg(v) and thresholds uniform(key, v).
// Synchronous rounds until no node changes.
Indicator simulate_lt(const Graph& g, const Indicator& seeds, RunKey key);

Indicator simulate(const Graph& g, const Indicator& seeds, const DiffusionModel& model, RunKey key);

// Pair i uses RunKey::derive(master_seed, i) for both its seed sample and its
// cascade, so the corpus is identical for any worker count.
std::vector<SeedDiffusionPair> generate_pairs(const Graph& g, const DiffusionModel& model,
                                              std::size_t num_pairs, std::size_t seeds_per_pair,
                                              std::uint64_t master_seed, std::size_t workers = 1);

// `count` distinct nodes drawn uniformly from 0..n-1 using the key's
// "seeds" sub-stream, returned ascending.
std::vector<NodeId> sample_seeds(std::size_t n, std::size_t count, RunKey key);

// Monte Carlo per-node infection frequency over `runs` cascades.
std::vector<double> estimate_infection_prob(const Graph& g, const Indicator& seeds,
                                            const DiffusionModel& model, std::size_t runs,
                                            std::uint64_t master_seed, std::size_t workers = 1);

// Exact IC infection probabilities by summing over all 2^m live-edge worlds.
// Refuses graphs with more than kMaxEnumerationEdges edges.
inline constexpr std::size_t kMaxEnumerationEdges = 20;
std::vector<double> enumerate_ic_exact(const Graph& g, const Indicator& seeds, double p);

// JSON Lines corpus, one object per pair:
//   {"seeds":[labels],"infected":[labels],"model":"IC","ic_p":0.1,"run_key":N}
// Labels are the graph's original node labels.
void write_pairs_jsonl(std::ostream& out, const Graph& g,
                       const std::vector<SeedDiffusionPair>& pairs);

// Accepts string or integer labels. "model", "ic_p" and "run_key" are
// optional so that externally collected cascades can be read.
std::vector<SeedDiffusionPair> read_pairs_jsonl(std::istream& in, const Graph& g);

void save_pairs(const std::string& path, const Graph& g, const std::vector<SeedDiffusionPair>& pairs);
std::vector<SeedDiffusionPair> load_pairs(const std::string& path, const Graph& g);

}  // namespace srcloc
