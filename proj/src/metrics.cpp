#include "srcloc/metrics.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace srcloc {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

Confusion confusion(const Indicator& predicted, const Indicator& truth) {
    if (predicted.size() != truth.size()) {
        throw Error(fmt::format("prediction has {} entries, truth has {}", predicted.size(), truth.size()));
    }
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

PointMetrics point_metrics(const Confusion& c) {
    if (c.total() == 0) throw Error("metrics need at least one node");
    PointMetrics m;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f_score = harmonic(m.precision, m.recall);
    return m;
}

double auc(std::span<const double> scores, const Indicator& truth) {
    if (scores.size() != truth.size()) {
        throw Error(fmt::format("{} scores for {} truth entries", scores.size(), truth.size()));
    }
    const std::size_t n = scores.size();
    const std::size_t pos = count_of(truth);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw UndefinedAuc();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Ranks are 1-based; a tie block spanning [i, j) shares rank (i + j + 1) / 2.
    // Doubled ranks keep every quantity an exact integer.
    std::size_t doubled_rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const std::size_t doubled_rank = i + j + 1;
        for (std::size_t t = i; t < j; ++t) {
            if (truth[order[t]]) doubled_rank_sum += doubled_rank;
        }
        i = j;
    }
    // U = R_pos - P(P+1)/2
    const double doubled_u = static_cast<double>(doubled_rank_sum - pos * (pos + 1));
    return doubled_u / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

Indicator threshold_decisions(std::span<const double> scores, double threshold) {
    Indicator out(scores.size(), 0);
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold;
    return out;
}

double select_threshold(const std::vector<ScoredTruth>& pairs) {
    if (pairs.empty()) throw Error("threshold selection needs at least one pair");

    // Per pair: positive and negative scores sorted ascending, so the count
    // at or above t is a binary search away.
    struct Sorted {
        std::vector<double> pos, neg;
    };
    std::vector<Sorted> sorted(pairs.size());
    std::vector<double> candidates;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (p.scores.size() != p.truth.size()) throw Error("score and truth lengths differ");
        for (std::size_t v = 0; v < p.scores.size(); ++v) {
            (p.truth[v] ? sorted[i].pos : sorted[i].neg).push_back(p.scores[v]);
            candidates.push_back(p.scores[v]);
        }
        std::sort(sorted[i].pos.begin(), sorted[i].pos.end());
        std::sort(sorted[i].neg.begin(), sorted[i].neg.end());
    }
    if (candidates.empty()) throw Error("threshold selection needs at least one score");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto at_or_above = [](const std::vector<double>& v, double t) {
        return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), t));
    };

    double best_t = candidates.back();
    double best_f = -1.0;
    // Descending scan with strict improvement keeps the largest t on ties.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        double sum = 0.0;
        for (const auto& s : sorted) {
            const std::size_t tp = at_or_above(s.pos, *it);
            const std::size_t fp = at_or_above(s.neg, *it);
            sum += harmonic(ratio(tp, tp + fp), ratio(tp, s.pos.size()));
        }
        const double mean = sum / static_cast<double>(sorted.size());
        if (mean > best_f) {
            best_f = mean;
            best_t = *it;
        }
    }
    return best_t;
}

Metric evaluate_pair(const Prediction& pred, const Indicator& truth) {
    if (pred.scores.size() != truth.size()) {
        throw Error(fmt::format("prediction covers {} nodes, truth {}", pred.scores.size(), truth.size()));
    }
    const auto pm = point_metrics(confusion(pred.sources, truth));
    Metric m{pm.accuracy, pm.precision, pm.recall, pm.f_score, std::nullopt, 0};
    try {
        m.auc = auc(pred.scores, truth);
    } catch (const UndefinedAuc&) {
        m.auc_undefined_pairs = 1;
    }
    return m;
}

Metric aggregate(std::span<const Metric> metrics) {
    if (metrics.empty()) throw Error("cannot aggregate an empty metric list");
    Metric out;
    double auc_sum = 0.0;
    std::size_t auc_count = 0;
    for (const auto& m : metrics) {
        out.accuracy += m.accuracy;
        out.precision += m.precision;
        out.recall += m.recall;
        out.f_score += m.f_score;
        if (m.auc) {
            auc_sum += *m.auc;
            ++auc_count;
        }
        out.auc_undefined_pairs += m.auc_undefined_pairs;
    }
    const auto count = static_cast<double>(metrics.size());
    out.accuracy /= count;
    out.precision /= count;
    out.recall /= count;
    out.f_score /= count;
    if (auc_count > 0) out.auc = auc_sum / static_cast<double>(auc_count);
    return out;
}

nlohmann::ordered_json to_json(const Metric& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f_score"] = m.f_score;
    if (m.auc) {
        j["auc"] = *m.auc;
    } else {
        j["auc"] = nullptr;
    }
    j["auc_undefined_pairs"] = m.auc_undefined_pairs;
    return j;
}

Metric metric_from_json(const nlohmann::json& j) {
    Metric m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f_score = j.at("f_score").get<double>();
    if (!j.at("auc").is_null()) m.auc = j.at("auc").get<double>();
    m.auc_undefined_pairs = j.value("auc_undefined_pairs", std::size_t{0});
    return m;
}

}  // namespace srcloc
