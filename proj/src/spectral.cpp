#include "srcloc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include <fmt/format.h>

#include "srcloc/error.hpp"

namespace srcloc {

LaplacianSubmatrix laplacian_submatrix(const Graph& g, std::vector<NodeId> nodes) {
    if (nodes.empty()) throw Error("Laplacian submatrix requested for an empty node set");
    if (nodes.size() > kMaxDenseInfected) {
        throw Error(fmt::format("dense Laplacian limited to {} nodes, got {}", kMaxDenseInfected,
                                nodes.size()));
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const auto k = static_cast<Eigen::Index>(nodes.size());
    LaplacianSubmatrix out;
    out.matrix = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const NodeId u = nodes[static_cast<std::size_t>(i)];
        out.matrix(i, i) = static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u)) {
            auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
            if (it != nodes.end() && *it == v) out.matrix(i, it - nodes.begin()) = -1.0;
        }
    }
    out.nodes = std::move(nodes);
    return out;
}

LaplacianSubmatrix laplacian_submatrix(const Graph& g, const Indicator& subset) {
    if (subset.size() != g.num_nodes()) throw Error("subset indicator size does not match graph");
    return laplacian_submatrix(g, members_of(subset));
}

namespace {

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0) v = -v;
}

}  // namespace

EigenPair smallest_eigvec(const Eigen::MatrixXd& m, const EigenOptions& opts) {
    if (m.rows() != m.cols() || m.rows() == 0) throw Error("eigensolver needs a non-empty square matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error("eigensolver needs a symmetric matrix");
    }
    const Eigen::Index k = m.rows();

    double lower = m(0, 0) - (m.row(0).cwiseAbs().sum() - std::abs(m(0, 0)));
    for (Eigen::Index i = 1; i < k; ++i) {
        lower = std::min(lower, m(i, i) - (m.row(i).cwiseAbs().sum() - std::abs(m(i, i))));
    }
    // Every eigenvalue is >= lower, so M - shift*I is positive definite.
    const double shift = lower - 1e-6;
    const Eigen::MatrixXd shifted = m - shift * Eigen::MatrixXd::Identity(k, k);
    const Eigen::LLT<Eigen::MatrixXd> chol(shifted);
    if (chol.info() != Eigen::Success) throw Error("shifted matrix is not positive definite");

    // Block inverse iteration with Rayleigh-Ritz. A single vector converges
    // at rate (l1 - shift) / (l2 - shift), which stalls when l1 and l2 are
    // close; the block replaces l2 by the first eigenvalue outside it. The
    // first column is the normalized all-ones vector, the rest are cosine
    // modes.
    const Eigen::Index b = std::min<Eigen::Index>(k, 6);
    Eigen::MatrixXd block(k, b);
    for (Eigen::Index j = 0; j < b; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            block(i, j) = std::cos(static_cast<double>(j) * (static_cast<double>(i) + 0.5) * std::numbers::pi /
                                   static_cast<double>(k));
        }
    }

    Eigen::VectorXd v, u;
    double lambda = 0.0, lambda2 = 0.0, residual = 0.0, residual2 = 0.0;
    auto ritz = [&] {
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(block).householderQ() *
                                  Eigen::MatrixXd::Identity(k, b);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(q.transpose() * m * q);
        block = q * small.eigenvectors();
        v = block.col(0);
        lambda = v.dot(m * v);
        residual = (m * v - lambda * v).norm();
        if (b > 1) {
            u = block.col(1);
            lambda2 = u.dot(m * u);
            residual2 = (m * u - lambda2 * u).norm();
        }
    };

    ritz();
    std::size_t it = 0;
    while (residual >= opts.tol) {
        if (it == opts.max_iter) {
            throw ConvergenceError(
                fmt::format("inverse iteration did not converge in {} iterations", opts.max_iter), residual);
        }
        block = chol.solve(block);
        ritz();
        ++it;
    }

    EigenPair out;
    out.value = lambda;
    out.vector = v;
    out.residual = residual;
    out.iterations = it;

    if (opts.detect_degenerate && b > 1) {
        // The second Ritz value approaches l2 from above; refine it without
        // disturbing the returned pair.
        for (std::size_t j = it; j < opts.max_iter && residual2 >= opts.tol; ++j) {
            block = chol.solve(block);
            ritz();
        }
        out.degenerate = std::abs(lambda2 - out.value) <= std::max(opts.tol, 1e-8 * scale);
    }
    fix_sign(out.vector);
    return out;
}

}  // namespace srcloc
