#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "srcloc/error.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/prediction.hpp"

namespace srcloc {

// Positive class = source node.
struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(const Indicator& predicted, const Indicator& truth);

struct PointMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

// 0/0 in precision, recall or F resolves to 0.
PointMetrics point_metrics(const Confusion& c);

class UndefinedAuc : public Error {
public:
    UndefinedAuc() : Error("AUC undefined: truth has only one class") {}
};

// Mann-Whitney statistic with average ranks for ties, O(n log n).
// Throws UndefinedAuc when truth is all-positive or all-negative.
double auc(std::span<const double> scores, const Indicator& truth);

// Decision rule score >= threshold.
Indicator threshold_decisions(std::span<const double> scores, double threshold);

struct ScoredTruth {
    std::vector<double> scores;
    Indicator truth;
};

// Scans every distinct pooled score as a threshold and returns the one with
// the highest mean F-score over the pairs (ties: largest threshold).
double select_threshold(const std::vector<ScoredTruth>& pairs);

// The five-number evaluation result. `auc` is empty when undefined;
// `auc_undefined_pairs` counts how many pairs contributed no AUC.
struct Metric {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    std::optional<double> auc;
    std::size_t auc_undefined_pairs = 0;

    friend bool operator==(const Metric&, const Metric&) = default;
};

Metric evaluate_pair(const Prediction& pred, const Indicator& truth);

// Macro average; undefined AUCs are excluded from the AUC mean.
Metric aggregate(std::span<const Metric> metrics);

nlohmann::ordered_json to_json(const Metric& m);
Metric metric_from_json(const nlohmann::json& j);

}  // namespace srcloc
