#include "srcloc/lpsi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "srcloc/error.hpp"

namespace srcloc {

namespace {

std::vector<double> inverse_sqrt_degrees(const Graph& g) {
    std::vector<double> d(g.num_nodes(), 0.0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (g.degree(v) > 0) d[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
    }
    return d;
}

void apply_normalized(const Graph& g, const std::vector<double>& isd, std::span<const double> x,
                      std::vector<double>& out) {
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        double acc = 0.0;
        for (NodeId v : g.neighbors(u)) acc += isd[v] * x[v];
        out[u] = isd[u] * acc;
    }
}

void require_infected(const Graph& g, const Indicator& infected) {
    if (infected.size() != g.num_nodes()) {
        throw Error(fmt::format("infection vector has length {}, graph has {} nodes",
                                infected.size(), g.num_nodes()));
    }
    if (count_of(infected) == 0) throw Error("infected set is empty");
}

}  // namespace

void LpsiConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(fmt::format("LPSI alpha must lie in (0, 1), got {}", alpha));
    }
    if (!(tol > 0.0)) throw Error(fmt::format("LPSI tolerance must be positive, got {}", tol));
    if (max_iter < 1) throw Error("LPSI max_iter must be at least 1");
}

Prediction set_prediction(std::size_t n, const std::vector<NodeId>& chosen) {
    Prediction p;
    p.sources = make_indicator(n, chosen);
    p.scores.assign(n, 0.0);
    for (NodeId v : chosen) p.scores[v] = 1.0;
    return p;
}

std::vector<double> normalized_adjacency_apply(const Graph& g, std::span<const double> x) {
    if (x.size() != g.num_nodes()) throw Error("vector length does not match graph");
    std::vector<double> out(g.num_nodes());
    apply_normalized(g, inverse_sqrt_degrees(g), x, out);
    return out;
}

std::vector<double> infection_labels(const Indicator& infected) {
    std::vector<double> y(infected.size());
    for (std::size_t v = 0; v < y.size(); ++v) y[v] = infected[v] ? 1.0 : -1.0;
    return y;
}

LpsiResult lpsi_scores(const Graph& g, const Indicator& infected, const LpsiConfig& cfg) {
    cfg.validate();
    require_infected(g, infected);

    const auto isd = inverse_sqrt_degrees(g);
    const auto y = infection_labels(infected);
    std::vector<double> x = y;
    std::vector<double> sx(x.size());

    LpsiResult r;
    for (r.iterations = 1; r.iterations <= cfg.max_iter; ++r.iterations) {
        apply_normalized(g, isd, x, sx);
        double delta = 0.0;
        for (std::size_t v = 0; v < x.size(); ++v) {
            const double next = cfg.alpha * sx[v] + (1.0 - cfg.alpha) * y[v];
            delta = std::max(delta, std::abs(next - x[v]));
            x[v] = next;
        }
        r.residual = delta;
        if (delta < cfg.tol) {
            r.scores = std::move(x);
            return r;
        }
    }
    throw ConvergenceError(
        fmt::format("LPSI did not converge in {} iterations (alpha {})", cfg.max_iter, cfg.alpha),
        r.residual);
}

std::vector<double> lpsi_closed_form(const Graph& g, const Indicator& infected, double alpha) {
    LpsiConfig{alpha}.validate();
    require_infected(g, infected);
    const std::size_t n = g.num_nodes();
    if (n > kMaxDenseLpsiNodes) {
        throw Error(fmt::format("dense LPSI solve limited to {} nodes, graph has {}",
                                kMaxDenseLpsiNodes, n));
    }

    const auto isd = inverse_sqrt_degrees(g);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.neighbors(u)) system(u, v) -= alpha * isd[u] * isd[v];
    }
    Eigen::VectorXd rhs(n);
    for (NodeId v = 0; v < n; ++v) rhs[v] = (1.0 - alpha) * (infected[v] ? 1.0 : -1.0);

    const Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(rhs);
    if (!x.allFinite()) throw Error("LPSI system is singular");
    return {x.data(), x.data() + n};
}

Prediction lpsi_predict(const Graph& g, const Indicator& infected, std::vector<double> scores) {
    require_infected(g, infected);
    if (scores.size() != g.num_nodes()) throw Error("score vector length does not match graph");

    Prediction p;
    p.sources.assign(g.num_nodes(), 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (!infected[v]) continue;
        const auto nb = g.neighbors(v);
        p.sources[v] = std::all_of(nb.begin(), nb.end(), [&](NodeId u) {
            return !infected[u] || scores[v] >= scores[u];
        });
    }
    p.scores = std::move(scores);
    return p;
}

Prediction lpsi(const Graph& g, const Indicator& infected, const LpsiConfig& cfg) {
    return lpsi_predict(g, infected, lpsi_scores(g, infected, cfg).scores);
}

}  // namespace srcloc
