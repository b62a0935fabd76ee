#include "srcloc/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "srcloc/hash.hpp"
#include "srcloc/ojc.hpp"
#include "srcloc/parallel.hpp"

namespace srcloc {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

class PhaseTimer {
public:
    explicit PhaseTimer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

    void mark(const std::string& phase) {
        const auto now = std::chrono::steady_clock::now();
        sink_.emplace_back(phase, std::chrono::duration<double, std::milli>(now - last_).count());
        last_ = now;
    }

private:
    std::vector<std::pair<std::string, double>>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Runs `fn` and prefixes any library error with the pipeline phase.
template <typename Fn>
auto in_phase(const char* phase, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", phase, e.what()));
    }
}

nlohmann::ordered_json to_json(const ValidationReport& v) {
    nlohmann::ordered_json j;
    j["dataset"] = v.dataset;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : v.entries) {
        entries.push_back({{"field", e.field}, {"expected", e.expected}, {"actual", e.actual}, {"match", e.match}});
    }
    j["entries"] = std::move(entries);
    return j;
}

ValidationReport validation_from_json(const nlohmann::json& j) {
    ValidationReport v;
    v.dataset = j.at("dataset").get<std::string>();
    for (const auto& e : j.at("entries")) {
        v.entries.push_back({e.at("field").get<std::string>(), e.at("expected").get<double>(),
                             e.at("actual").get<double>(), e.at("match").get<bool>()});
    }
    return v;
}

bool same_validation(const std::optional<ValidationReport>& a, const std::optional<ValidationReport>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    if (a->dataset != b->dataset || a->entries.size() != b->entries.size()) return false;
    for (std::size_t i = 0; i < a->entries.size(); ++i) {
        const auto& x = a->entries[i];
        const auto& y = b->entries[i];
        if (x.field != y.field || x.expected != y.expected || x.actual != y.actual || x.match != y.match) {
            return false;
        }
    }
    return true;
}

std::string format_number(double x) { return fmt::format("{}", x); }

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::Lpsi: return "lpsi";
        case Method::NetSleuth: return "netsleuth";
        case Method::Ojc: return "ojc";
        case Method::Gcnsi: return "gcnsi";
        case Method::External: return "external";
    }
    return "external";
}

Method parse_method(const std::string& s) {
    const auto l = lower(s);
    if (l == "lpsi") return Method::Lpsi;
    if (l == "netsleuth") return Method::NetSleuth;
    if (l == "ojc") return Method::Ojc;
    if (l == "gcnsi") return Method::Gcnsi;
    if (l == "external") return Method::External;
    throw Error(fmt::format("unknown method '{}' (expected lpsi, netsleuth, ojc or gcnsi)", s));
}

std::string to_string(ThresholdMode m) { return m == ThresholdMode::Peak ? "peak" : "f1"; }

ThresholdMode parse_threshold_mode(const std::string& s) {
    const auto l = lower(s);
    if (l == "peak") return ThresholdMode::Peak;
    if (l == "f1") return ThresholdMode::F1;
    throw Error(fmt::format("unknown threshold mode '{}' (expected peak or f1)", s));
}

std::string to_string(ReportFormat f) { return f == ReportFormat::Json ? "json" : "csv"; }

ReportFormat parse_report_format(const std::string& s) {
    const auto l = lower(s);
    if (l == "json") return ReportFormat::Json;
    if (l == "csv") return ReportFormat::Csv;
    throw Error(fmt::format("unknown report format '{}' (expected json or csv)", s));
}

void BenchConfig::validate() const {
    if (builtin.empty() == graph_path.empty()) {
        throw Error("exactly one graph source is required (builtin or graph_path)");
    }
    if (!builtin.empty() && lower(builtin) != "karate") {
        throw Error(fmt::format("unknown builtin graph '{}' (available: karate)", builtin));
    }
    if (!(split > 0.0 && split < 1.0)) throw Error(fmt::format("split must lie in (0, 1), got {}", split));
    if (pairs_file.empty()) {
        model.validate();
        if (num_pairs < 2) throw Error("at least two pairs are needed for a train/test split");
        if (seeds_per_pair < 1) throw Error("seeds_per_pair must be at least 1");
    }
    lpsi.validate();
    gcn.validate();
    if (ojc_k && *ojc_k < 1) throw Error("ojc_k must be at least 1");
    if (!(netsleuth.lambda_ripple >= 0.0)) throw Error("lambda_ripple must be non-negative");
}

nlohmann::ordered_json to_json(const BenchConfig& c) {
    nlohmann::ordered_json j;
    j["builtin"] = c.builtin;
    j["graph_path"] = c.graph_path;
    j["dataset"] = c.dataset;
    j["pairs_file"] = c.pairs_file;
    j["model"] = to_string(c.model.kind);
    j["ic_p"] = c.model.ic_p;
    j["num_pairs"] = c.num_pairs;
    j["seeds_per_pair"] = c.seeds_per_pair;
    j["split"] = c.split;
    j["method"] = to_string(c.method);
    j["alpha"] = c.lpsi.alpha;
    j["tol"] = c.lpsi.tol;
    j["max_iter"] = c.lpsi.max_iter;
    j["threshold_mode"] = to_string(c.threshold_mode);
    j["max_seeds"] = c.netsleuth.max_seeds;
    j["lambda_ripple"] = c.netsleuth.lambda_ripple;
    if (c.ojc_k) {
        j["ojc_k"] = *c.ojc_k;
    } else {
        j["ojc_k"] = nullptr;
    }
    j["hidden"] = c.gcn.hidden;
    j["lr"] = c.gcn.lr;
    j["epochs"] = c.gcn.epochs;
    j["alphas"] = c.gcn.alphas;
    if (c.gcn.pos_weight.automatic) {
        j["pos_weight"] = "auto";
    } else {
        j["pos_weight"] = c.gcn.pos_weight.value;
    }
    j["init_seed"] = c.gcn.init_seed;
    j["master_seed"] = c.master_seed;
    j["load_model"] = c.load_model;
    j["predictions_file"] = c.predictions_file;
    return j;
}

BenchConfig config_from_json(const nlohmann::json& j, BenchConfig c) {
    if (!j.is_object()) throw Error("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "builtin") c.builtin = value.get<std::string>();
            else if (key == "graph_path") c.graph_path = value.get<std::string>();
            else if (key == "dataset") c.dataset = value.get<std::string>();
            else if (key == "pairs_file") c.pairs_file = value.get<std::string>();
            else if (key == "model") c.model.kind = parse_model_kind(value.get<std::string>());
            else if (key == "ic_p") c.model.ic_p = value.get<double>();
            else if (key == "num_pairs") c.num_pairs = value.get<std::size_t>();
            else if (key == "seeds_per_pair") c.seeds_per_pair = value.get<std::size_t>();
            else if (key == "split") c.split = value.get<double>();
            else if (key == "method") c.method = parse_method(value.get<std::string>());
            else if (key == "alpha") c.lpsi.alpha = value.get<double>();
            else if (key == "tol") c.lpsi.tol = value.get<double>();
            else if (key == "max_iter") c.lpsi.max_iter = value.get<std::size_t>();
            else if (key == "threshold_mode") c.threshold_mode = parse_threshold_mode(value.get<std::string>());
            else if (key == "max_seeds") c.netsleuth.max_seeds = value.get<std::size_t>();
            else if (key == "lambda_ripple") c.netsleuth.lambda_ripple = value.get<double>();
            else if (key == "ojc_k") {
                if (value.is_null()) c.ojc_k.reset();
                else c.ojc_k = value.get<std::size_t>();
            }
            else if (key == "hidden") c.gcn.hidden = value.get<std::size_t>();
            else if (key == "lr") c.gcn.lr = value.get<double>();
            else if (key == "epochs") c.gcn.epochs = value.get<std::size_t>();
            else if (key == "alphas") c.gcn.alphas = value.get<std::vector<double>>();
            else if (key == "pos_weight") {
                if (value.is_string() && lower(value.get<std::string>()) == "auto") c.gcn.pos_weight = {true, 1.0};
                else c.gcn.pos_weight = {false, value.get<double>()};
            }
            else if (key == "init_seed") c.gcn.init_seed = value.get<std::uint64_t>();
            else if (key == "master_seed") c.master_seed = value.get<std::uint64_t>();
            else if (key == "output") c.output = value.get<std::string>();
            else if (key == "format") c.format = parse_report_format(value.get<std::string>());
            else if (key == "workers") c.workers = value.get<std::size_t>();
            else if (key == "save_model") c.save_model = value.get<std::string>();
            else if (key == "load_model") c.load_model = value.get<std::string>();
            else if (key == "emit_mdl") c.emit_mdl = value.get<std::string>();
            else if (key == "emit_predictions") c.emit_predictions = value.get<std::string>();
            else if (key == "predictions_file") c.predictions_file = value.get<std::string>();
            else throw Error("unknown key");
        } catch (const nlohmann::json::exception& e) {
            throw Error(fmt::format("config key '{}': {}", key, e.what()));
        } catch (const Error& e) {
            throw Error(fmt::format("config key '{}': {}", key, e.what()));
        }
    }
    return c;
}

BenchConfig load_config(const std::string& path, BenchConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open config '{}'", path));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(fmt::format("malformed config '{}': {}", path, e.what()));
    }
    return config_from_json(j, std::move(base));
}

LoadedGraph load_graph(const BenchConfig& cfg) {
    LoadedGraph out;
    if (!cfg.builtin.empty()) {
        if (lower(cfg.builtin) != "karate") throw Error(fmt::format("unknown builtin graph '{}'", cfg.builtin));
        out.graph = builtin_karate();
        out.source = "builtin:karate";
    } else {
        auto parsed = load_edge_list(cfg.graph_path);
        out.graph = std::move(parsed.graph);
        out.duplicate_edges = parsed.duplicate_edges;
        out.self_loops = parsed.self_loops;
        out.source = cfg.graph_path;
    }
    if (!cfg.dataset.empty()) {
        out.validation = validate_against_registry(out.graph, cfg.dataset);
    } else if (!cfg.builtin.empty()) {
        out.validation = validate_against_registry(out.graph, cfg.builtin);
    }
    return out;
}

Split split_pairs(std::size_t count, double split, std::uint64_t master_seed) {
    if (count < 2) throw Error(fmt::format("a train/test split needs at least 2 pairs, got {}", count));
    if (!(split > 0.0 && split < 1.0)) throw Error(fmt::format("split must lie in (0, 1), got {}", split));

    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    const std::uint64_t key = substream(master_seed, "split");
    for (std::size_t i = count - 1; i > 0; --i) {
        std::swap(order[i], order[bounded(hash(key, i), i + 1)]);
    }

    // The epsilon absorbs representation error such as 0.8 * 50 = 40.000...01.
    auto n_train = static_cast<std::size_t>(std::ceil(split * static_cast<double>(count) - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, count - 1);

    Split s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return s;
}

bool operator==(const Report& a, const Report& b) {
    // Config key order is not significant.
    const bool same_config = nlohmann::json::parse(a.config.dump()) == nlohmann::json::parse(b.config.dump());
    return a.version == b.version && same_config && a.graph.nodes == b.graph.nodes &&
           a.graph.edges == b.graph.edges && a.graph.avg_degree == b.graph.avg_degree &&
           same_validation(a.validation, b.validation) && a.num_pairs == b.num_pairs &&
           a.num_train == b.num_train && a.threshold == b.threshold && a.loss_curve == b.loss_curve &&
           a.pairs == b.pairs && a.aggregate == b.aggregate;
}

namespace {

struct Evaluated {
    Prediction prediction;
    std::optional<MdlReport> mdl;
};

nlohmann::ordered_json prediction_json(const Graph& g, std::size_t pair_index, const Prediction& p) {
    nlohmann::ordered_json j;
    j["pair_index"] = pair_index;
    auto sources = nlohmann::ordered_json::array();
    for (NodeId v : members_of(p.sources)) sources.push_back(g.label(v));
    j["sources"] = std::move(sources);
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (NodeId v = 0; v < g.num_nodes(); ++v) scores[g.label(v)] = p.scores[v];
    j["scores"] = std::move(scores);
    return j;
}

void write_lines(const std::string& path, const std::vector<nlohmann::ordered_json>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path));
    for (const auto& j : lines) out << j.dump() << '\n';
    if (!out) throw Error(fmt::format("error while writing '{}'", path));
}

Report start_report(const BenchConfig& cfg, const LoadedGraph& lg) {
    Report r;
    r.config = to_json(cfg);
    r.graph = graph_stats(lg.graph);
    r.validation = lg.validation;
    return r;
}

void finish_report(Report& r) {
    std::vector<Metric> metrics;
    metrics.reserve(r.pairs.size());
    for (const auto& p : r.pairs) metrics.push_back(p.metric);
    r.aggregate = aggregate(metrics);
}

}  // namespace

Report run_pipeline(const BenchConfig& cfg) {
    cfg.validate();
    if (cfg.method == Method::External) throw Error("method 'external' is only valid for eval");

    Report report;
    PhaseTimer timer(report.timing_ms);

    const LoadedGraph lg = in_phase("load graph", [&] { return load_graph(cfg); });
    const Graph& g = lg.graph;
    report = start_report(cfg, lg);
    timer.mark("load_graph");

    const auto pairs = in_phase("pairs", [&] {
        return cfg.pairs_file.empty()
                   ? generate_pairs(g, cfg.model, cfg.num_pairs, cfg.seeds_per_pair, cfg.master_seed, cfg.workers)
                   : load_pairs(cfg.pairs_file, g);
    });
    report.num_pairs = pairs.size();
    timer.mark("pairs");

    const Split split = in_phase("split", [&] { return split_pairs(pairs.size(), cfg.split, cfg.master_seed); });
    report.num_train = split.train.size();
    timer.mark("split");

    // Fit phase.
    std::optional<GcnModel> model;
    in_phase("fit", [&] {
        if (cfg.method == Method::Lpsi && cfg.threshold_mode == ThresholdMode::F1) {
            std::vector<ScoredTruth> train(split.train.size());
            parallel_for(split.train.size(), cfg.workers, [&](std::size_t i) {
                const auto& pair = pairs[split.train[i]];
                train[i] = {lpsi_scores(g, pair.infected, cfg.lpsi).scores, pair.seeds};
            });
            report.threshold = select_threshold(train);
        } else if (cfg.method == Method::Gcnsi) {
            if (!cfg.load_model.empty()) {
                model = load_model(cfg.load_model, g);
            } else {
                std::vector<SeedDiffusionPair> train;
                for (std::size_t i : split.train) train.push_back(pairs[i]);
                model = train_gcnsi(g, train, cfg.gcn, cfg.workers);
            }
            report.loss_curve = model->loss_curve;
            if (!cfg.save_model.empty()) save_model(cfg.save_model, *model);
        }
        return 0;
    });
    timer.mark("fit");

    std::vector<Evaluated> results(split.test.size());
    in_phase("evaluate", [&] {
        parallel_for(split.test.size(), cfg.workers, [&](std::size_t i) {
            const auto& pair = pairs[split.test[i]];
            Evaluated& out = results[i];
            try {
                switch (cfg.method) {
                    case Method::Lpsi: {
                        auto scores = lpsi_scores(g, pair.infected, cfg.lpsi).scores;
                        if (report.threshold) {
                            out.prediction.sources = threshold_decisions(scores, *report.threshold);
                            out.prediction.scores = std::move(scores);
                        } else {
                            out.prediction = lpsi_predict(g, pair.infected, std::move(scores));
                        }
                        break;
                    }
                    case Method::NetSleuth: {
                        auto r = netsleuth(g, pair.infected, cfg.netsleuth);
                        out.prediction = std::move(r.prediction);
                        out.mdl = std::move(r.mdl);
                        break;
                    }
                    case Method::Ojc:
                        out.prediction = ojc(g, pair.infected, cfg.ojc_k).prediction;
                        break;
                    case Method::Gcnsi:
                        out.prediction = predict_gcnsi(*model, g, pair.infected);
                        break;
                    case Method::External:
                        break;
                }
            } catch (const Error& e) {
                throw Error(fmt::format("pair {}: {}", split.test[i], e.what()));
            }
        });
        return 0;
    });

    for (std::size_t i = 0; i < split.test.size(); ++i) {
        report.pairs.push_back({split.test[i], evaluate_pair(results[i].prediction, pairs[split.test[i]].seeds)});
    }
    finish_report(report);
    timer.mark("evaluate");

    if (!cfg.emit_predictions.empty()) {
        std::vector<nlohmann::ordered_json> lines;
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            lines.push_back(prediction_json(g, split.test[i], results[i].prediction));
        }
        write_lines(cfg.emit_predictions, lines);
    }
    if (!cfg.emit_mdl.empty() && cfg.method == Method::NetSleuth) {
        std::vector<nlohmann::ordered_json> lines;
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            auto j = to_json(*results[i].mdl, g);
            j["pair_index"] = split.test[i];
            lines.push_back(std::move(j));
        }
        write_lines(cfg.emit_mdl, lines);
    }
    return report;
}

Report evaluate_predictions(const BenchConfig& cfg) {
    if (cfg.pairs_file.empty()) throw Error("eval needs a pair corpus (pairs_file)");
    if (cfg.predictions_file.empty()) throw Error("eval needs a predictions file");

    Report report;
    PhaseTimer timer(report.timing_ms);
    const LoadedGraph lg = in_phase("load graph", [&] { return load_graph(cfg); });
    const Graph& g = lg.graph;
    BenchConfig echo = cfg;
    echo.method = Method::External;
    report = start_report(echo, lg);
    timer.mark("load_graph");

    const auto pairs = in_phase("pairs", [&] { return load_pairs(cfg.pairs_file, g); });
    report.num_pairs = pairs.size();
    timer.mark("pairs");

    std::ifstream in(cfg.predictions_file, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open predictions '{}'", cfg.predictions_file));
    std::string line;
    std::size_t lineno = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::size_t index = j.contains("pair_index") ? j["pair_index"].get<std::size_t>() : row;
            ++row;
            if (index >= pairs.size()) {
                throw Error(fmt::format("pair_index {} outside corpus of {} pairs", index, pairs.size()));
            }
            Prediction p;
            p.sources.assign(g.num_nodes(), 0);
            for (const auto& item : j.at("sources")) {
                p.sources[g.index_of(item.is_string() ? item.get<std::string>() : item.dump())] = 1;
            }
            if (j.contains("scores")) {
                p.scores.assign(g.num_nodes(), 0.0);
                for (const auto& [label, value] : j["scores"].items()) p.scores[g.index_of(label)] = value.get<double>();
            } else {
                p.scores.assign(p.sources.begin(), p.sources.end());
            }
            report.pairs.push_back({index, evaluate_pair(p, pairs[index].seeds)});
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (report.pairs.empty()) throw Error("predictions file holds no predictions");
    finish_report(report);
    timer.mark("evaluate");
    return report;
}

nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["version"] = r.version;
    j["config"] = r.config;
    j["graph"] = {{"nodes", r.graph.nodes}, {"edges", r.graph.edges}, {"avg_degree", r.graph.avg_degree}};
    if (r.validation) {
        j["validation"] = to_json(*r.validation);
    } else {
        j["validation"] = nullptr;
    }
    j["num_pairs"] = r.num_pairs;
    j["num_train"] = r.num_train;
    j["num_test"] = r.pairs.size();
    if (r.threshold) {
        j["threshold"] = *r.threshold;
    } else {
        j["threshold"] = nullptr;
    }
    j["loss_curve"] = r.loss_curve;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : r.pairs) {
        auto m = to_json(p.metric);
        nlohmann::ordered_json entry;
        entry["pair_index"] = p.pair_index;
        for (auto& [k, v] : m.items()) entry[k] = v;
        pairs.push_back(std::move(entry));
    }
    j["pairs"] = std::move(pairs);
    j["aggregate"] = to_json(r.aggregate);
    nlohmann::ordered_json timing = nlohmann::ordered_json::object();
    for (const auto& [phase, ms] : r.timing_ms) timing[phase] = ms;
    j["timing_ms"] = std::move(timing);
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    try {
        Report r;
        r.version = j.at("version").get<std::string>();
        // Re-serialize through ordered_json to keep key order stable.
        r.config = nlohmann::ordered_json::parse(j.at("config").dump());
        const auto& g = j.at("graph");
        r.graph = {g.at("nodes").get<std::size_t>(), g.at("edges").get<std::size_t>(), g.at("avg_degree").get<double>()};
        if (!j.at("validation").is_null()) r.validation = validation_from_json(j.at("validation"));
        r.num_pairs = j.at("num_pairs").get<std::size_t>();
        r.num_train = j.at("num_train").get<std::size_t>();
        if (!j.at("threshold").is_null()) r.threshold = j.at("threshold").get<double>();
        r.loss_curve = j.at("loss_curve").get<std::vector<double>>();
        for (const auto& p : j.at("pairs")) r.pairs.push_back({p.at("pair_index").get<std::size_t>(), metric_from_json(p)});
        r.aggregate = metric_from_json(j.at("aggregate"));
        if (j.contains("timing_ms")) {
            for (const auto& [phase, ms] : j["timing_ms"].items()) r.timing_ms.emplace_back(phase, ms.get<double>());
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("malformed report: {}", e.what()));
    }
}

std::string render_report(const Report& r, ReportFormat format) {
    if (format == ReportFormat::Json) return to_json(r).dump(2) + "\n";

    std::ostringstream out;
    out << "pair_index,accuracy,precision,recall,f_score,auc\n";
    auto row = [&](const std::string& label, const Metric& m) {
        out << label << ',' << format_number(m.accuracy) << ',' << format_number(m.precision) << ','
            << format_number(m.recall) << ',' << format_number(m.f_score) << ','
            << (m.auc ? format_number(*m.auc) : std::string()) << '\n';
    };
    for (const auto& p : r.pairs) row(std::to_string(p.pair_index), p.metric);
    row("mean", r.aggregate);
    return out.str();
}

void write_report(const Report& r, const std::string& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write report '{}'", path));
    out << render_report(r, format);
    if (!out) throw Error(fmt::format("error while writing report '{}'", path));
}

}  // namespace srcloc
