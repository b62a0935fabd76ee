#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "srcloc/graph.hpp"

namespace srcloc {

inline constexpr std::size_t kMaxDenseInfected = 5000;

// Graph Laplacian restricted to a node subset. Rows and columns follow
// `nodes` (ascending); the diagonal holds the full-graph degree, and an
// off-diagonal entry is -1 iff both nodes are in the subset and adjacent.
struct LaplacianSubmatrix {
    std::vector<NodeId> nodes;
    Eigen::MatrixXd matrix;
};

LaplacianSubmatrix laplacian_submatrix(const Graph& g, const Indicator& subset);
LaplacianSubmatrix laplacian_submatrix(const Graph& g, std::vector<NodeId> nodes);

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;  // unit norm, largest-magnitude entry positive
    double residual = 0.0;   // ||M v - value v||_2
    std::size_t iterations = 0;
    // The second-smallest eigenvalue coincides with the smallest (within
    // tolerance), so any unit vector of that eigenspace is a valid answer.
    bool degenerate = false;
};

struct EigenOptions {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    bool detect_degenerate = true;
};

// Smallest eigenpair of a symmetric matrix by inverse iteration with a fixed
// shift just below the Gershgorin lower bound. Starts from the normalized
// all-ones vector. Throws ConvergenceError if the residual does not drop
// below tol within max_iter iterations.
EigenPair smallest_eigvec(const Eigen::MatrixXd& m, const EigenOptions& opts = {});

}  // namespace srcloc
