#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "srcloc/diffusion.hpp"
#include "srcloc/gcn.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/lpsi.hpp"
#include "srcloc/metrics.hpp"
#include "srcloc/netsleuth.hpp"
#include "srcloc/registry.hpp"

namespace srcloc {

inline constexpr const char* kVersion = "0.1.0";

enum class Method { Lpsi, NetSleuth, Ojc, Gcnsi, External };
enum class ThresholdMode { Peak, F1 };
enum class ReportFormat { Json, Csv };

std::string to_string(Method m);
Method parse_method(const std::string& s);
std::string to_string(ThresholdMode m);
ThresholdMode parse_threshold_mode(const std::string& s);
std::string to_string(ReportFormat f);
ReportFormat parse_report_format(const std::string& s);

// Full description of one experiment. Serialized as a flat JSON object whose
// keys are the member names below; the same document is accepted as a
// config file.
struct BenchConfig {
    // Graph source: exactly one of builtin / graph_path.
    std::string builtin;
    std::string graph_path;
    std::string dataset;  // registry row to validate against (optional)

    // Pairs: read from pairs_file when set, otherwise generated.
    std::string pairs_file;
    DiffusionModel model = DiffusionModel::ic(0.1);
    std::size_t num_pairs = 50;
    std::size_t seeds_per_pair = 1;

    double split = 0.8;
    Method method = Method::Lpsi;
    LpsiConfig lpsi;
    ThresholdMode threshold_mode = ThresholdMode::Peak;
    NetsleuthConfig netsleuth;
    std::optional<std::size_t> ojc_k;
    GcnHyper gcn;
    std::uint64_t master_seed = 0;

    std::string output;
    ReportFormat format = ReportFormat::Json;
    std::size_t workers = 1;
    std::string save_model;
    std::string load_model;
    std::string emit_mdl;
    std::string emit_predictions;
    std::string predictions_file;  // eval only

    void validate() const;
};

// Fields that can change the report's numbers. Output destinations (output,
// format, save_model, emit_mdl, emit_predictions) and `workers` are left out,
// so reruns that only write elsewhere produce identical reports.
nlohmann::ordered_json to_json(const BenchConfig& cfg);

// Applies the keys present in `j` on top of `base`; unknown keys are errors.
BenchConfig config_from_json(const nlohmann::json& j, BenchConfig base = {});
BenchConfig load_config(const std::string& path, BenchConfig base = {});

struct LoadedGraph {
    Graph graph;
    std::string source;
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
    std::optional<ValidationReport> validation;
};

// Validates against `dataset` when set, else against the builtin's own
// registry row.
LoadedGraph load_graph(const BenchConfig& cfg);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Shuffles pair indices with the "split" sub-stream of master_seed and puts
// the first ceil(split * count) in train, keeping both sides non-empty.
Split split_pairs(std::size_t count, double split, std::uint64_t master_seed);

struct PairResult {
    std::size_t pair_index = 0;  // position in the corpus
    Metric metric;

    friend bool operator==(const PairResult&, const PairResult&) = default;
};

struct Report {
    std::string version = kVersion;
    nlohmann::ordered_json config;
    GraphStats graph;
    std::optional<ValidationReport> validation;
    std::size_t num_pairs = 0;
    std::size_t num_train = 0;
    std::optional<double> threshold;
    std::vector<double> loss_curve;
    std::vector<PairResult> pairs;
    Metric aggregate;
    // Wall-clock milliseconds per phase; the only non-deterministic field.
    std::vector<std::pair<std::string, double>> timing_ms;
};

// Equality ignores timing_ms.
bool operator==(const Report& a, const Report& b);

Report run_pipeline(const BenchConfig& cfg);

// Scores the predictions in cfg.predictions_file against cfg.pairs_file.
// Each JSON line: {"pair_index":i, "sources":[labels], "scores":{label:value}}
// with "scores" optional (defaults to the source indicator) and missing
// labels scored 0.
Report evaluate_predictions(const BenchConfig& cfg);

nlohmann::ordered_json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

// json: the nested document. csv: pair_index,accuracy,precision,recall,
// f_score,auc per test pair, then a row labelled "mean" holding the
// aggregate; undefined AUC is an empty field.
std::string render_report(const Report& r, ReportFormat format);
void write_report(const Report& r, const std::string& path, ReportFormat format);

}  // namespace srcloc
