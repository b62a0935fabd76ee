#include "srcloc/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <fmt/format.h>
#include "json.hpp"

#include "srcloc/error.hpp"
#include "srcloc/parallel.hpp"

namespace srcloc {

namespace {

void require_seeds(const Graph& g, const Indicator& seeds) {
    if (seeds.size() != g.num_nodes()) {
        throw Error(fmt::format("seed vector has length {}, graph has {} nodes", seeds.size(),
                                g.num_nodes()));
    }
    if (count_of(seeds) == 0) throw Error("seed set is empty");
}

void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(fmt::format("IC probability {} outside [0, 1]", p));
}

}  // namespace

void DiffusionModel::validate() const {
    if (kind == ModelKind::IC) require_probability(ic_p);
    if (kind == ModelKind::Unknown) throw Error("diffusion model is unknown; cannot simulate");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::IC: return "IC";
        case ModelKind::LT: return "LT";
        case ModelKind::Unknown: return "unknown";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
    std::string lower;
    for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "ic") return ModelKind::IC;
    if (lower == "lt") return ModelKind::LT;
    throw Error(fmt::format("unknown diffusion model '{}' (expected IC or LT)", s));
}

Indicator simulate_ic(const Graph& g, const Indicator& seeds, double p, RunKey key) {
    require_seeds(g, seeds);
    require_probability(p);

    Indicator infected = seeds;
    std::vector<NodeId> stack = members_of(seeds);
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        const auto nb = g.neighbors(u);
        const auto ids = g.incident_edges(u);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const NodeId v = nb[i];
            if (infected[v]) continue;
            if (uniform(key.value, ids[i]) < p) {
                infected[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return infected;
}

Indicator simulate_lt(const Graph& g, const Indicator& seeds, RunKey key) {
    require_seeds(g, seeds);

    const std::size_t n = g.num_nodes();
    Indicator active = seeds;
    std::vector<std::uint32_t> active_neighbors(n, 0);
    std::vector<NodeId> fresh = members_of(seeds);
    std::vector<NodeId> touched;
    std::vector<std::uint8_t> queued(n, 0);

    while (!fresh.empty()) {
        touched.clear();
        for (NodeId u : fresh) {
            for (NodeId v : g.neighbors(u)) {
                if (active[v]) continue;
                ++active_neighbors[v];
                if (!queued[v]) {
                    queued[v] = 1;
                    touched.push_back(v);
                }
            }
        }
        // Decide the whole round on last round's state, then commit.
        std::sort(touched.begin(), touched.end());
        fresh.clear();
        for (NodeId v : touched) {
            queued[v] = 0;
            const double weight =
                static_cast<double>(active_neighbors[v]) / static_cast<double>(g.degree(v));
            if (weight >= uniform(key.value, v)) fresh.push_back(v);
        }
        for (NodeId v : fresh) active[v] = 1;
    }
    return active;
}

Indicator simulate(const Graph& g, const Indicator& seeds, const DiffusionModel& model, RunKey key) {
    model.validate();
    return model.kind == ModelKind::IC ? simulate_ic(g, seeds, model.ic_p, key)
                                       : simulate_lt(g, seeds, key);
}

std::vector<NodeId> sample_seeds(std::size_t n, std::size_t count, RunKey key) {
    if (count > n) throw Error(fmt::format("cannot sample {} seeds from {} nodes", count, n));
    const std::uint64_t stream = substream(key.value, "seeds");
    // Partial Fisher-Yates over a sparse swap map, O(count) per sample.
    std::unordered_map<std::uint64_t, std::uint64_t> swaps;
    auto lookup = [&](std::uint64_t i) {
        auto it = swaps.find(i);
        return it == swaps.end() ? i : it->second;
    };
    std::vector<NodeId> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + bounded(hash(stream, i), n - i);
        const std::uint64_t vi = lookup(i);
        const std::uint64_t vj = lookup(j);
        swaps[j] = vi;
        swaps[i] = vj;
        out.push_back(static_cast<NodeId>(vj));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SeedDiffusionPair> generate_pairs(const Graph& g, const DiffusionModel& model,
                                              std::size_t num_pairs, std::size_t seeds_per_pair,
                                              std::uint64_t master_seed, std::size_t workers) {
    model.validate();
    const std::size_t n = g.num_nodes();
    if (num_pairs < 1) throw Error("num_pairs must be at least 1");
    if (seeds_per_pair < 1 || seeds_per_pair >= n) {
        throw Error(fmt::format("seeds_per_pair must be in [1, {}), got {}", n, seeds_per_pair));
    }

    std::vector<SeedDiffusionPair> pairs(num_pairs);
    parallel_for(num_pairs, workers, [&](std::size_t i) {
        const RunKey key = RunKey::derive(master_seed, i);
        SeedDiffusionPair& pair = pairs[i];
        pair.seeds = make_indicator(n, sample_seeds(n, seeds_per_pair, key));
        pair.infected = simulate(g, pair.seeds, model, key);
        pair.model = model;
        pair.run_key = key;
    });
    return pairs;
}

std::vector<double> estimate_infection_prob(const Graph& g, const Indicator& seeds,
                                            const DiffusionModel& model, std::size_t runs,
                                            std::uint64_t master_seed, std::size_t workers) {
    if (runs < 1) throw Error("runs must be at least 1");
    model.validate();
    require_seeds(g, seeds);

    const std::size_t n = g.num_nodes();
    workers = std::clamp<std::size_t>(workers, 1, runs);
    // Per-worker integer tallies; integer sums are order-independent.
    std::vector<std::vector<std::uint64_t>> tallies(workers, std::vector<std::uint64_t>(n, 0));
    parallel_for(workers, workers, [&](std::size_t w) {
        for (std::size_t i = w; i < runs; i += workers) {
            const auto infected = simulate(g, seeds, model, RunKey::derive(master_seed, i));
            for (std::size_t v = 0; v < n; ++v) tallies[w][v] += infected[v];
        }
    });

    std::vector<double> prob(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        std::uint64_t total = 0;
        for (const auto& t : tallies) total += t[v];
        prob[v] = static_cast<double>(total) / static_cast<double>(runs);
    }
    return prob;
}

std::vector<double> enumerate_ic_exact(const Graph& g, const Indicator& seeds, double p) {
    require_seeds(g, seeds);
    require_probability(p);
    const std::size_t m = g.num_edges();
    if (m > kMaxEnumerationEdges) {
        throw Error(fmt::format("exact enumeration refused: {} edges exceeds the limit of {}", m,
                                kMaxEnumerationEdges));
    }

    const std::size_t n = g.num_nodes();
    std::vector<double> prob(n, 0.0);
    std::vector<NodeId> stack;
    Indicator reached;
    for (std::uint64_t world = 0; world < (std::uint64_t{1} << m); ++world) {
        const int live = std::popcount(world);
        const double weight = std::pow(p, live) * std::pow(1.0 - p, static_cast<int>(m) - live);
        if (weight == 0.0) continue;

        reached = seeds;
        stack = members_of(seeds);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            const auto nb = g.neighbors(u);
            const auto ids = g.incident_edges(u);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                if (!reached[nb[i]] && ((world >> ids[i]) & 1U)) {
                    reached[nb[i]] = 1;
                    stack.push_back(nb[i]);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (reached[v]) prob[v] += weight;
        }
    }
    return prob;
}

void write_pairs_jsonl(std::ostream& out, const Graph& g,
                       const std::vector<SeedDiffusionPair>& pairs) {
    for (const auto& pair : pairs) {
        nlohmann::ordered_json j;
        auto labels = [&](const Indicator& ind) {
            auto arr = nlohmann::ordered_json::array();
            for (NodeId v : members_of(ind)) arr.push_back(g.label(v));
            return arr;
        };
        j["seeds"] = labels(pair.seeds);
        j["infected"] = labels(pair.infected);
        if (pair.model.kind != ModelKind::Unknown) j["model"] = to_string(pair.model.kind);
        if (pair.model.kind == ModelKind::IC) j["ic_p"] = pair.model.ic_p;
        j["run_key"] = pair.run_key.value;
        out << j.dump() << '\n';
    }
}

std::vector<SeedDiffusionPair> read_pairs_jsonl(std::istream& in, const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<SeedDiffusionPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            auto indicator = [&](const char* field) {
                if (!j.contains(field) || !j[field].is_array()) {
                    throw Error(fmt::format("missing array field \"{}\"", field));
                }
                Indicator ind(n, 0);
                for (const auto& item : j[field]) {
                    std::string label;
                    if (item.is_string()) {
                        label = item.get<std::string>();
                    } else if (item.is_number_integer()) {
                        label = item.dump();
                    } else {
                        throw Error(fmt::format("\"{}\" holds a non-label value {}", field, item.dump()));
                    }
                    ind[g.index_of(label)] = 1;
                }
                return ind;
            };

            SeedDiffusionPair pair;
            pair.seeds = indicator("seeds");
            pair.infected = indicator("infected");
            if (count_of(pair.seeds) == 0) throw Error("pair has no seeds");
            if (!is_subset(pair.seeds, pair.infected)) throw Error("a seed is not marked infected");

            pair.model.kind = j.contains("model") ? parse_model_kind(j["model"].get<std::string>())
                                                  : ModelKind::Unknown;
            pair.model.ic_p = j.contains("ic_p") ? j["ic_p"].get<double>() : 0.0;
            if (pair.model.kind != ModelKind::IC) pair.model.ic_p = 0.0;
            pair.run_key.value = j.contains("run_key") ? j["run_key"].get<std::uint64_t>() : 0;
            pairs.push_back(std::move(pair));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return pairs;
}

void save_pairs(const std::string& path, const Graph& g, const std::vector<SeedDiffusionPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write pair corpus '{}'", path));
    write_pairs_jsonl(out, g, pairs);
    if (!out) throw Error(fmt::format("error while writing '{}'", path));
}

std::vector<SeedDiffusionPair> load_pairs(const std::string& path, const Graph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open pair corpus '{}'", path));
    return read_pairs_jsonl(in, g);
}

}  // namespace srcloc
