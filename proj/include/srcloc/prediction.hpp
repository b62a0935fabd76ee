#pragma once

#include <vector>

#include "srcloc/graph.hpp"

namespace srcloc {

// Output of a localization method: a real score per node (used for AUC) and
// the binary source decision.
struct Prediction {
    std::vector<double> scores;
    Indicator sources;
};

// Prediction whose scores are the 0/1 indicator of `chosen`.
Prediction set_prediction(std::size_t n, const std::vector<NodeId>& chosen);

}  // namespace srcloc
