#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "json.hpp"

#include "srcloc/diffusion.hpp"
#include "srcloc/graph.hpp"
#include "srcloc/prediction.hpp"

namespace srcloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Two-layer graph convolutional source classifier:
//   H      = relu(Â X W0 + b0)
//   logits = Â H W1 + b1
//   P      = row-softmax(logits)       column 1 = P(source)
struct GcnParams {
    Matrix w0;  // f_in x hidden
    Vector b0;  // hidden
    Matrix w1;  // hidden x 2
    Vector b1;  // 2

    static GcnParams zeros(std::size_t f_in, std::size_t hidden);
    std::size_t f_in() const { return static_cast<std::size_t>(w0.rows()); }
    std::size_t hidden() const { return static_cast<std::size_t>(w0.cols()); }

    friend bool operator==(const GcnParams& a, const GcnParams& b) {
        return a.w0 == b.w0 && a.b0 == b.b0 && a.w1 == b.w1 && a.b1 == b.b1;
    }
};

struct PosWeight {
    bool automatic = true;  // (#non-sources) / (#sources) of each pair
    double value = 1.0;     // used when not automatic
};

struct GcnHyper {
    std::size_t hidden = 32;
    double lr = 0.01;
    std::size_t epochs = 200;
    std::vector<double> alphas{0.3, 0.5, 0.7};
    PosWeight pos_weight;
    std::uint64_t init_seed = 0;

    void validate() const;
    std::size_t num_features() const { return 1 + alphas.size(); }
};

// Column 0: +1/-1 infection labels. Column j >= 1: LPSI scores with
// alpha = alphas[j - 1].
Matrix build_features(const Graph& g, const Indicator& infected, const std::vector<double>& alphas);

// Â = D̃^-1/2 (A + I) D̃^-1/2 with D̃ = D + I.
SparseOperator normalized_adjacency_with_self_loops(const Graph& g);

struct GcnCache {
    Matrix ax;      // Â X
    Matrix z0;      // Â X W0 + b0
    Matrix h;       // relu(z0)
    Matrix ah;      // Â H
    Matrix probs;   // n x 2
};

// Throws Error when the output is not finite.
GcnCache gcn_forward(const GcnParams& params, const SparseOperator& a_hat, const Matrix& x);

// -(1/n) * sum_v w_v log P[v, label_v], w_v = pos_weight for sources.
double gcn_loss(const Matrix& probs, const Indicator& labels, double pos_weight);

// (#non-sources) / (#sources); throws when there are no sources.
double auto_pos_weight(const Indicator& labels);

// Analytic gradient of gcn_loss at the cached forward pass.
GcnParams gcn_backward(const GcnCache& cache, const GcnParams& params, const SparseOperator& a_hat,
                       const Indicator& labels, double pos_weight);

// Glorot-uniform weights drawn from the counter-based generator, zero biases.
GcnParams init_params(std::size_t f_in, std::size_t hidden, std::uint64_t seed);

struct GcnModel {
    GcnParams params;
    GcnHyper hyper;
    SparseOperator a_hat;
    std::vector<double> loss_curve;  // mean per-pair loss before each step
};

// Full-batch gradient descent: every epoch sums the gradients of all
// training pairs (in pair order) and takes one step of size lr.
GcnModel train_gcnsi(const Graph& g, const std::vector<SeedDiffusionPair>& train_pairs,
                     const GcnHyper& hyper, std::size_t workers = 1);

// Sources are nodes whose source probability is strictly above 0.5.
Prediction predict_gcnsi(const GcnModel& model, const Graph& g, const Indicator& infected);

nlohmann::ordered_json to_json(const GcnModel& model);
GcnModel gcn_model_from_json(const nlohmann::json& j, const Graph& g);
void save_model(const std::string& path, const GcnModel& model);
GcnModel load_model(const std::string& path, const Graph& g);

}  // namespace srcloc
