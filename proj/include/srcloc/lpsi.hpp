#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srcloc/graph.hpp"
#include "srcloc/prediction.hpp"

namespace srcloc {

// Label propagation source identification.
//
// With y_v = +1 for infected and -1 for uninfected nodes, the scores are the
// fixed point of x = alpha * S x + (1 - alpha) * y where S = D^-1/2 A D^-1/2.
// Sources are the local peaks of x within the infected subgraph.
struct LpsiConfig {
    double alpha = 0.5;
    double tol = 1e-8;
    std::size_t max_iter = 1000;

    void validate() const;
};

struct LpsiResult {
    std::vector<double> scores;
    std::size_t iterations = 0;
    double residual = 0.0;  // last ||x_new - x||_inf
};

// S x, with rows and columns of isolated nodes treated as zero.
std::vector<double> normalized_adjacency_apply(const Graph& g, std::span<const double> x);

// +1 / -1 label vector.
std::vector<double> infection_labels(const Indicator& infected);

// Fixed-point iteration from x = y. Throws ConvergenceError when the
// residual is still >= tol after max_iter sweeps.
LpsiResult lpsi_scores(const Graph& g, const Indicator& infected, const LpsiConfig& cfg = {});

// Dense direct solve of (I - alpha S) x = (1 - alpha) y. Limited to
// kMaxDenseLpsiNodes nodes; used as a reference for the iterative solver.
inline constexpr std::size_t kMaxDenseLpsiNodes = 2000;
std::vector<double> lpsi_closed_form(const Graph& g, const Indicator& infected, double alpha);

// Infected nodes whose score is >= the score of every infected neighbor.
Prediction lpsi_predict(const Graph& g, const Indicator& infected, std::vector<double> scores);

Prediction lpsi(const Graph& g, const Indicator& infected, const LpsiConfig& cfg = {});

}  // namespace srcloc
