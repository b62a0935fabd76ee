#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "support.hpp"

#include "srcloc/error.hpp"
#include "srcloc/spectral.hpp"

using namespace srcloc;
using namespace srcloc::testing;

TEST_SUITE("spectral") {

TEST_CASE("P5 submatrix over the middle three nodes") {
    auto sub = laplacian_submatrix(path_graph(5), nodes(5, {1, 2, 3}));
    CHECK(sub.nodes == std::vector<NodeId>{1, 2, 3});
    Eigen::Matrix3d expect;
    expect << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK(sub.matrix == expect);
}

TEST_CASE("single node gives its full degree") {
    auto sub = laplacian_submatrix(star_graph(4), nodes(5, {0}));
    REQUIRE(sub.matrix.rows() == 1);
    CHECK(sub.matrix(0, 0) == 4.0);
}

TEST_CASE("whole graph gives the graph Laplacian") {
    Graph g = builtin_karate();
    auto sub = laplacian_submatrix(g, all_nodes(g));
    for (NodeId u = 0; u < 34; ++u) {
        CHECK(sub.matrix.row(u).sum() == 0.0);
        for (NodeId v = 0; v < 34; ++v) {
            double want = u == v ? static_cast<double>(g.degree(u)) : (g.has_edge(u, v) ? -1.0 : 0.0);
            CHECK(sub.matrix(u, v) == want);
        }
    }
    auto eig = smallest_eigvec(sub.matrix);
    CHECK(std::abs(eig.value) < 1e-9);
    for (Eigen::Index i = 0; i < 34; ++i) CHECK(std::abs(eig.vector[i] - 1.0 / std::sqrt(34.0)) < 1e-9);
}

TEST_CASE("node lists are sorted and deduplicated") {
    auto sub = laplacian_submatrix(path_graph(5), std::vector<NodeId>{3, 1, 3, 2});
    CHECK(sub.nodes == std::vector<NodeId>{1, 2, 3});
    CHECK_THROWS_AS(laplacian_submatrix(path_graph(5), Indicator(5, 0)), Error);
}

TEST_CASE("path Laplacian eigenpair") {
    Eigen::Matrix3d m;
    m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    auto eig = smallest_eigvec(m);
    CHECK(std::abs(eig.value - (2.0 - std::sqrt(2.0))) < 1e-9);
    Eigen::Vector3d want(1.0, std::sqrt(2.0), 1.0);
    want.normalize();
    CHECK((eig.vector - want).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(eig.residual < 1e-9);
    CHECK_FALSE(eig.degenerate);
}

TEST_CASE("identity is flagged degenerate") {
    auto eig = smallest_eigvec(Eigen::MatrixXd::Identity(4, 4));
    CHECK(std::abs(eig.value - 1.0) < 1e-12);
    CHECK(std::abs(eig.vector.norm() - 1.0) < 1e-12);
    CHECK(eig.degenerate);
}

TEST_CASE("diagonal matrix") {
    Eigen::Matrix2d m;
    m << 1, 0, 0, 5;
    auto eig = smallest_eigvec(m);
    CHECK(std::abs(eig.value - 1.0) < 1e-9);
    CHECK(std::abs(eig.vector[0] - 1.0) < 1e-6);
    CHECK(std::abs(eig.vector[1]) < 1e-6);
    CHECK_FALSE(eig.degenerate);
}

TEST_CASE("input checks") {
    CHECK_THROWS_AS(smallest_eigvec(Eigen::MatrixXd(0, 0)), Error);
    CHECK_THROWS_AS(smallest_eigvec(Eigen::MatrixXd::Zero(2, 3)), Error);
    Eigen::Matrix2d asym;
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(smallest_eigvec(asym), Error);
    // Larger than the iteration block, so one step cannot be exact.
    Indicator most = all_nodes(builtin_karate());
    most[0] = 0;
    Eigen::MatrixXd m = laplacian_submatrix(builtin_karate(), most).matrix;
    try {
        smallest_eigvec(m, EigenOptions{1e-15, 1, false});
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 1e-15);
    }
}

TEST_CASE("agrees with a full symmetric eigensolver on random infected submatrices") {
    Graph g = builtin_karate();
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Indicator inf(34, 0);
        for (auto& b : inf) b = rng() % 2;
        inf[rng() % 34] = 1;
        auto sub = laplacian_submatrix(g, inf);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(sub.matrix);
        const auto& vals = ref.eigenvalues();
        auto eig = smallest_eigvec(sub.matrix);
        CHECK(std::abs(eig.value - vals[0]) < 1e-8);
        CHECK((sub.matrix * eig.vector - eig.value * eig.vector).norm() < 1e-8);
        const bool gap = vals.size() == 1 || vals[1] - vals[0] > 1e-6;
        CHECK(eig.degenerate == !gap);
        if (gap) {
            Eigen::VectorXd want = ref.eigenvectors().col(0);
            Eigen::Index arg;
            want.cwiseAbs().maxCoeff(&arg);
            if (want[arg] < 0) want = -want;
            CHECK((eig.vector - want).cwiseAbs().maxCoeff() < 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

}
