#include "srcloc/cli.hpp"

#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "srcloc/bench.hpp"
#include "srcloc/diffusion.hpp"
#include "srcloc/error.hpp"
#include "srcloc/registry.hpp"

namespace srcloc {

namespace {

// Flags are parsed into temporaries and applied to a BenchConfig only when
// given, so that they override config-file values which override defaults.
class Bindings {
public:
    template <typename T, typename Apply>
    CLI::Option* add(CLI::App* app, const std::string& name, const std::string& desc, Apply apply) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, desc);
        appliers_.push_back([opt, value, apply](BenchConfig& c) {
            if (opt->count() > 0) apply(c, *value);
        });
        return opt;
    }

    void apply(BenchConfig& c) const {
        for (const auto& f : appliers_) f(c);
    }

private:
    std::vector<std::function<void(BenchConfig&)>> appliers_;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(fmt::format("'{}' is not a number", item));
        }
    }
    return out;
}

void add_graph_options(CLI::App* app, Bindings& b) {
    b.add<std::string>(app, "--builtin", "Builtin graph (karate)",
                       [](BenchConfig& c, const std::string& v) { c.builtin = v; c.graph_path.clear(); });
    b.add<std::string>(app, "--graph", "Edge-list file",
                       [](BenchConfig& c, const std::string& v) { c.graph_path = v; c.builtin.clear(); });
    b.add<std::string>(app, "--dataset", "Registry dataset to validate the graph against",
                       [](BenchConfig& c, const std::string& v) { c.dataset = v; });
}

void add_simulation_options(CLI::App* app, Bindings& b) {
    b.add<std::string>(app, "--model", "Diffusion model: ic or lt",
                       [](BenchConfig& c, const std::string& v) { c.model.kind = parse_model_kind(v); });
    b.add<double>(app, "--p", "IC edge activation probability",
                  [](BenchConfig& c, double v) { c.model.ic_p = v; });
    b.add<std::size_t>(app, "--pairs", "Number of seed-diffusion pairs",
                       [](BenchConfig& c, std::size_t v) { c.num_pairs = v; });
    b.add<std::size_t>(app, "--seeds", "Seeds per pair",
                       [](BenchConfig& c, std::size_t v) { c.seeds_per_pair = v; });
    b.add<std::uint64_t>(app, "--seed", "Master seed",
                         [](BenchConfig& c, std::uint64_t v) { c.master_seed = v; });
    b.add<std::size_t>(app, "--workers", "Worker threads",
                       [](BenchConfig& c, std::size_t v) { c.workers = v; });
}

void add_output_options(CLI::App* app, Bindings& b) {
    b.add<std::string>(app, "-o,--output", "Output path (stdout when omitted)",
                       [](BenchConfig& c, const std::string& v) { c.output = v; });
    b.add<std::string>(app, "--format", "Report format: json or csv",
                       [](BenchConfig& c, const std::string& v) { c.format = parse_report_format(v); });
}

void add_method_options(CLI::App* app, Bindings& b) {
    b.add<std::string>(app, "--method", "lpsi, netsleuth, ojc or gcnsi",
                       [](BenchConfig& c, const std::string& v) { c.method = parse_method(v); });
    b.add<double>(app, "--split", "Training fraction in (0, 1)", [](BenchConfig& c, double v) { c.split = v; });
    b.add<double>(app, "--alpha", "LPSI propagation weight", [](BenchConfig& c, double v) { c.lpsi.alpha = v; });
    b.add<double>(app, "--tol", "LPSI residual tolerance", [](BenchConfig& c, double v) { c.lpsi.tol = v; });
    b.add<std::size_t>(app, "--max-iter", "LPSI iteration cap",
                       [](BenchConfig& c, std::size_t v) { c.lpsi.max_iter = v; });
    b.add<std::string>(app, "--threshold-mode", "LPSI decision rule: peak or f1",
                       [](BenchConfig& c, const std::string& v) { c.threshold_mode = parse_threshold_mode(v); });
    b.add<std::size_t>(app, "--max-seeds", "NetSleuth seed cap (0 = automatic)",
                       [](BenchConfig& c, std::size_t v) { c.netsleuth.max_seeds = v; });
    b.add<double>(app, "--lambda-ripple", "NetSleuth ripple-cost weight",
                  [](BenchConfig& c, double v) { c.netsleuth.lambda_ripple = v; });
    b.add<std::size_t>(app, "--k", "OJC number of centers (default: infected components)",
                       [](BenchConfig& c, std::size_t v) { c.ojc_k = v; });
    b.add<std::size_t>(app, "--hidden", "GCNSI hidden width", [](BenchConfig& c, std::size_t v) { c.gcn.hidden = v; });
    b.add<double>(app, "--lr", "GCNSI learning rate", [](BenchConfig& c, double v) { c.gcn.lr = v; });
    b.add<std::size_t>(app, "--epochs", "GCNSI epochs", [](BenchConfig& c, std::size_t v) { c.gcn.epochs = v; });
    b.add<std::string>(app, "--alphas", "GCNSI feature alphas, comma separated",
                       [](BenchConfig& c, const std::string& v) { c.gcn.alphas = parse_list(v); });
    b.add<std::string>(app, "--pos-weight", "GCNSI source-class weight: auto or a number",
                       [](BenchConfig& c, const std::string& v) {
                           if (v == "auto") {
                               c.gcn.pos_weight = {true, 1.0};
                           } else {
                               const auto xs = parse_list(v);
                               if (xs.size() != 1) throw Error(fmt::format("bad --pos-weight '{}'", v));
                               c.gcn.pos_weight = {false, xs.front()};
                           }
                       });
    b.add<std::uint64_t>(app, "--init-seed", "GCNSI initialization seed",
                         [](BenchConfig& c, std::uint64_t v) { c.gcn.init_seed = v; });
    b.add<std::string>(app, "--save-model", "Write the trained GCNSI model",
                       [](BenchConfig& c, const std::string& v) { c.save_model = v; });
    b.add<std::string>(app, "--load-model", "Use a saved GCNSI model instead of training",
                       [](BenchConfig& c, const std::string& v) { c.load_model = v; });
    b.add<std::string>(app, "--emit-mdl", "Write NetSleuth MDL diagnostics (JSON Lines)",
                       [](BenchConfig& c, const std::string& v) { c.emit_mdl = v; });
    b.add<std::string>(app, "--emit-predictions", "Write per-pair predictions (JSON Lines)",
                       [](BenchConfig& c, const std::string& v) { c.emit_predictions = v; });
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path));
    f << text;
    if (!f) throw Error(fmt::format("error while writing '{}'", path));
}

std::string summary_line(const Report& r) {
    const auto& m = r.aggregate;
    return fmt::format("{} test pairs: accuracy {:.4f}, precision {:.4f}, recall {:.4f}, f-score {:.4f}, auc {}",
                       r.pairs.size(), m.accuracy, m.precision, m.recall, m.f_score,
                       m.auc ? fmt::format("{:.4f}", *m.auc) : std::string("undefined"));
}

void print_validation(const ValidationReport& v, std::ostream& out) {
    out << fmt::format("registry check against {}:\n", v.dataset);
    for (const auto& e : v.entries) {
        const bool integral = e.field != "avg_degree";
        out << fmt::format("  {:<10} expected {:>10} actual {:>10}  {}\n", e.field,
                           integral ? fmt::format("{:.0f}", e.expected) : fmt::format("{:.3f}", e.expected),
                           integral ? fmt::format("{:.0f}", e.actual) : fmt::format("{:.3f}", e.actual),
                           e.match ? "ok" : "MISMATCH");
    }
}

void print_methods(std::ostream& out) {
    out << "lpsi       label propagation scores, local peaks in the infected subgraph\n"
           "           --alpha 0.5  --tol 1e-8  --max-iter 1000  --threshold-mode peak|f1\n"
           "netsleuth  eigenvector seed selection with an MDL stopping rule\n"
           "           --max-seeds 0 (auto)  --lambda-ripple 1.0  --emit-mdl PATH\n"
           "ojc        greedy Jordan cover over infected nodes and their neighbors\n"
           "           --k (default: number of infected components)\n"
           "gcnsi      two-layer GCN over LPSI-enhanced features\n"
           "           --hidden 32  --lr 0.01  --epochs 200  --alphas 0.3,0.5,0.7\n"
           "           --pos-weight auto  --init-seed 0  --save-model PATH  --load-model PATH\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph source localization benchmark"};
    app.name("srcloc");
    app.require_subcommand(1);

    Bindings stats_b, sim_b, run_b, eval_b;
    bool list_registry = false;
    std::string config_path;

    auto* stats = app.add_subcommand("stats", "Print graph statistics and registry validation");
    add_graph_options(stats, stats_b);
    stats->add_flag("--registry", list_registry, "List the dataset registry");

    auto* simulate = app.add_subcommand("simulate", "Generate a seed-diffusion pair corpus");
    add_graph_options(simulate, sim_b);
    add_simulation_options(simulate, sim_b);
    simulate->add_option("--config", config_path, "JSON config file");
    sim_b.add<std::string>(simulate, "-o,--output", "Output JSON Lines path (stdout when omitted)",
                           [](BenchConfig& c, const std::string& v) { c.output = v; });

    auto* run = app.add_subcommand("run", "Run the full localization pipeline");
    add_graph_options(run, run_b);
    add_simulation_options(run, run_b);
    add_method_options(run, run_b);
    add_output_options(run, run_b);
    run->add_option("--config", config_path, "JSON config file");
    run_b.add<std::string>(run, "--pairs-file", "Read pairs instead of simulating",
                           [](BenchConfig& c, const std::string& v) { c.pairs_file = v; });

    auto* eval = app.add_subcommand("eval", "Score a prediction file against a pair corpus");
    add_graph_options(eval, eval_b);
    add_output_options(eval, eval_b);
    eval->add_option("--config", config_path, "JSON config file");
    eval_b.add<std::string>(eval, "--pairs-file", "Pair corpus (JSON Lines)",
                            [](BenchConfig& c, const std::string& v) { c.pairs_file = v; });
    eval_b.add<std::string>(eval, "--predictions", "Predictions (JSON Lines)",
                            [](BenchConfig& c, const std::string& v) { c.predictions_file = v; });

    auto* methods = app.add_subcommand("methods", "List localization methods and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    auto build = [&](const Bindings& b) {
        BenchConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        b.apply(cfg);
        return cfg;
    };

    try {
        if (*methods) {
            print_methods(out);
            return 0;
        }

        if (*stats) {
            if (list_registry) {
                out << fmt::format("{:<16} {:>7} {:>7} {:>10}  {}\n", "dataset", "nodes", "edges", "avg_deg", "pairs");
                for (const auto& d : registry()) {
                    out << fmt::format("{:<16} {:>7} {:>7} {:>10.3f}  {}\n", d.name, d.expected_nodes,
                                       d.expected_edges, d.expected_avg_degree, d.has_pairs ? "yes" : "no");
                }
                return 0;
            }
            BenchConfig cfg = build(stats_b);
            if (cfg.builtin.empty() == cfg.graph_path.empty()) {
                err << "stats: give exactly one of --builtin or --graph (or --registry)\n";
                return 1;
            }
            const auto lg = load_graph(cfg);
            out << format_stats(graph_stats(lg.graph)) << '\n';
            if (lg.duplicate_edges + lg.self_loops > 0) {
                out << fmt::format("dropped {} duplicate edge(s) and {} self-loop(s)\n", lg.duplicate_edges,
                                   lg.self_loops);
            }
            if (lg.validation) print_validation(*lg.validation, out);
            return 0;
        }

        if (*simulate) {
            BenchConfig cfg = build(sim_b);
            if (cfg.builtin.empty() == cfg.graph_path.empty()) {
                err << "simulate: give exactly one of --builtin or --graph\n";
                return 1;
            }
            const auto lg = load_graph(cfg);
            const auto pairs = generate_pairs(lg.graph, cfg.model, cfg.num_pairs, cfg.seeds_per_pair,
                                              cfg.master_seed, cfg.workers);
            std::ostringstream text;
            write_pairs_jsonl(text, lg.graph, pairs);
            emit(cfg.output, text.str(), out);
            if (!cfg.output.empty()) out << fmt::format("wrote {} pairs to {}\n", pairs.size(), cfg.output);
            return 0;
        }

        const bool is_run = static_cast<bool>(*run);
        BenchConfig cfg = build(is_run ? run_b : eval_b);
        if (cfg.builtin.empty() == cfg.graph_path.empty()) {
            err << (is_run ? "run" : "eval") << ": give exactly one of --builtin or --graph\n";
            return 1;
        }
        const Report report = is_run ? run_pipeline(cfg) : evaluate_predictions(cfg);
        if (cfg.output.empty()) {
            out << render_report(report, cfg.format);
        } else {
            write_report(report, cfg.output, cfg.format);
            out << summary_line(report) << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace srcloc
