#include "srcloc/gcn.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "srcloc/error.hpp"
#include "srcloc/hash.hpp"
#include "srcloc/lpsi.hpp"
#include "srcloc/parallel.hpp"

namespace srcloc {

GcnParams GcnParams::zeros(std::size_t f_in, std::size_t hidden) {
    const auto f = static_cast<Eigen::Index>(f_in);
    const auto h = static_cast<Eigen::Index>(hidden);
    return {Matrix::Zero(f, h), Vector::Zero(h), Matrix::Zero(h, 2), Vector::Zero(2)};
}

void GcnHyper::validate() const {
    if (hidden < 1) throw Error("GCN hidden width must be at least 1");
    if (!(lr > 0.0)) throw Error(fmt::format("GCN learning rate must be positive, got {}", lr));
    if (epochs < 1) throw Error("GCN epochs must be at least 1");
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw Error(fmt::format("feature alpha {} outside (0, 1)", a));
    }
    if (!pos_weight.automatic && !(pos_weight.value > 0.0)) {
        throw Error(fmt::format("pos_weight must be positive, got {}", pos_weight.value));
    }
}

Matrix build_features(const Graph& g, const Indicator& infected, const std::vector<double>& alphas) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Matrix x(n, static_cast<Eigen::Index>(1 + alphas.size()));
    const auto y = infection_labels(infected);
    for (Eigen::Index v = 0; v < n; ++v) x(v, 0) = y[static_cast<std::size_t>(v)];
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        LpsiConfig cfg;
        cfg.alpha = alphas[j];
        const auto s = lpsi_scores(g, infected, cfg).scores;
        for (Eigen::Index v = 0; v < n; ++v) x(v, static_cast<Eigen::Index>(j + 1)) = s[static_cast<std::size_t>(v)];
    }
    return x;
}

SparseOperator normalized_adjacency_with_self_loops(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<double> isd(n);
    for (NodeId v = 0; v < n; ++v) isd[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n + 2 * g.num_edges());
    for (NodeId u = 0; u < n; ++u) {
        entries.emplace_back(u, u, isd[u] * isd[u]);
        for (NodeId v : g.neighbors(u)) entries.emplace_back(u, v, isd[u] * isd[v]);
    }
    SparseOperator a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

GcnCache gcn_forward(const GcnParams& params, const SparseOperator& a_hat, const Matrix& x) {
    if (x.rows() != a_hat.rows() || x.cols() != params.w0.rows() || params.b0.size() != params.w0.cols() ||
        params.w1.rows() != params.w0.cols() || params.w1.cols() != 2 || params.b1.size() != 2) {
        throw Error("GCN forward: inconsistent shapes");
    }
    GcnCache c;
    c.ax = a_hat * x;
    c.z0 = (c.ax * params.w0).rowwise() + params.b0.transpose();
    c.h = c.z0.cwiseMax(0.0);
    c.ah = a_hat * c.h;
    Matrix logits = (c.ah * params.w1).rowwise() + params.b1.transpose();

    c.probs.resize(logits.rows(), 2);
    for (Eigen::Index v = 0; v < logits.rows(); ++v) {
        const double top = logits.row(v).maxCoeff();
        const double e0 = std::exp(logits(v, 0) - top);
        const double e1 = std::exp(logits(v, 1) - top);
        c.probs(v, 0) = e0 / (e0 + e1);
        c.probs(v, 1) = e1 / (e0 + e1);
    }
    if (!c.probs.allFinite()) throw Error("GCN forward produced non-finite output");
    return c;
}

double gcn_loss(const Matrix& probs, const Indicator& labels, double pos_weight) {
    if (!(pos_weight > 0.0)) throw Error("pos_weight must be positive");
    if (static_cast<std::size_t>(probs.rows()) != labels.size() || probs.cols() != 2) {
        throw Error("GCN loss: shape mismatch");
    }
    double total = 0.0;
    for (Eigen::Index v = 0; v < probs.rows(); ++v) {
        const bool src = labels[static_cast<std::size_t>(v)] != 0;
        total += (src ? pos_weight : 1.0) * std::log(probs(v, src ? 1 : 0));
    }
    return -total / static_cast<double>(probs.rows());
}

double auto_pos_weight(const Indicator& labels) {
    const std::size_t sources = count_of(labels);
    if (sources == 0) throw Error("automatic pos_weight needs at least one source");
    if (sources == labels.size()) throw Error("automatic pos_weight needs at least one non-source");
    return static_cast<double>(labels.size() - sources) / static_cast<double>(sources);
}

GcnParams gcn_backward(const GcnCache& cache, const GcnParams& params, const SparseOperator& a_hat,
                       const Indicator& labels, double pos_weight) {
    const Eigen::Index n = cache.probs.rows();
    if (static_cast<std::size_t>(n) != labels.size()) throw Error("GCN backward: label length mismatch");

    Matrix d_logits = cache.probs;
    for (Eigen::Index v = 0; v < n; ++v) {
        const bool src = labels[static_cast<std::size_t>(v)] != 0;
        d_logits(v, src ? 1 : 0) -= 1.0;
        d_logits.row(v) *= (src ? pos_weight : 1.0) / static_cast<double>(n);
    }

    GcnParams grad;
    grad.w1 = cache.ah.transpose() * d_logits;
    grad.b1 = d_logits.colwise().sum().transpose();
    // Â is symmetric, so back-propagating through Â·H reuses Â.
    Matrix d_h = a_hat * (d_logits * params.w1.transpose());
    Matrix d_z0 = d_h.cwiseProduct((cache.z0.array() > 0.0).cast<double>().matrix());
    grad.w0 = cache.ax.transpose() * d_z0;
    grad.b0 = d_z0.colwise().sum().transpose();
    return grad;
}

GcnParams init_params(std::size_t f_in, std::size_t hidden, std::uint64_t seed) {
    GcnParams p = GcnParams::zeros(f_in, hidden);
    auto fill = [](Matrix& w, std::uint64_t stream) {
        const double s = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        // Row-major counter so the draw order matches the serialized layout.
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const auto id = static_cast<std::uint64_t>(r * w.cols() + c);
                w(r, c) = (2.0 * uniform(stream, id) - 1.0) * s;
            }
        }
    };
    fill(p.w0, substream(seed, "gcn.w0"));
    fill(p.w1, substream(seed, "gcn.w1"));
    return p;
}

namespace {

struct TrainingExample {
    Matrix features;
    Indicator labels;
    double pos_weight = 1.0;
};

}  // namespace

GcnModel train_gcnsi(const Graph& g, const std::vector<SeedDiffusionPair>& train_pairs,
                     const GcnHyper& hyper, std::size_t workers) {
    hyper.validate();
    if (train_pairs.empty()) throw Error("GCNSI training needs at least one pair");

    std::vector<TrainingExample> examples(train_pairs.size());
    parallel_for(train_pairs.size(), workers, [&](std::size_t i) {
        const auto& pair = train_pairs[i];
        if (pair.seeds.size() != g.num_nodes()) throw Error("training pair does not match graph");
        if (count_of(pair.seeds) == 0) throw Error(fmt::format("training pair {} has no sources", i));
        examples[i].features = build_features(g, pair.infected, hyper.alphas);
        examples[i].labels = pair.seeds;
        examples[i].pos_weight =
            hyper.pos_weight.automatic ? auto_pos_weight(pair.seeds) : hyper.pos_weight.value;
    });

    GcnModel model;
    model.hyper = hyper;
    model.a_hat = normalized_adjacency_with_self_loops(g);
    model.params = init_params(hyper.num_features(), hyper.hidden, hyper.init_seed);
    model.loss_curve.reserve(hyper.epochs);

    std::vector<GcnParams> grads(examples.size());
    std::vector<double> losses(examples.size());
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        parallel_for(examples.size(), workers, [&](std::size_t i) {
            const auto& ex = examples[i];
            const auto cache = gcn_forward(model.params, model.a_hat, ex.features);
            losses[i] = gcn_loss(cache.probs, ex.labels, ex.pos_weight);
            grads[i] = gcn_backward(cache, model.params, model.a_hat, ex.labels, ex.pos_weight);
        });

        double loss = 0.0;
        GcnParams total = GcnParams::zeros(hyper.num_features(), hyper.hidden);
        for (std::size_t i = 0; i < examples.size(); ++i) {
            loss += losses[i];
            total.w0 += grads[i].w0;
            total.b0 += grads[i].b0;
            total.w1 += grads[i].w1;
            total.b1 += grads[i].b1;
        }
        loss /= static_cast<double>(examples.size());
        if (!std::isfinite(loss)) throw Error(fmt::format("GCNSI loss became non-finite at epoch {}", epoch));
        model.loss_curve.push_back(loss);

        model.params.w0 -= hyper.lr * total.w0;
        model.params.b0 -= hyper.lr * total.b0;
        model.params.w1 -= hyper.lr * total.w1;
        model.params.b1 -= hyper.lr * total.b1;
    }
    return model;
}

Prediction predict_gcnsi(const GcnModel& model, const Graph& g, const Indicator& infected) {
    if (static_cast<std::size_t>(model.a_hat.rows()) != g.num_nodes() || infected.size() != g.num_nodes()) {
        throw Error(fmt::format("GCNSI model was built for {} nodes, graph has {}", model.a_hat.rows(),
                                g.num_nodes()));
    }
    const auto cache = gcn_forward(model.params, model.a_hat, build_features(g, infected, model.hyper.alphas));
    Prediction p;
    p.scores.resize(g.num_nodes());
    p.sources.assign(g.num_nodes(), 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        p.scores[v] = cache.probs(v, 1);
        p.sources[v] = p.scores[v] > 0.5;
    }
    return p;
}

namespace {

nlohmann::ordered_json row_major(const Matrix& m) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    }
    return arr;
}

Matrix from_row_major(const nlohmann::json& arr, Eigen::Index rows, Eigen::Index cols) {
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
        throw Error(fmt::format("model array has {} entries, expected {}x{}", arr.size(), rows, cols));
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[static_cast<std::size_t>(r * cols + c)].get<double>();
    }
    return m;
}

}  // namespace

nlohmann::ordered_json to_json(const GcnModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "srcloc-gcnsi";
    j["nodes"] = model.a_hat.rows();
    j["f_in"] = model.params.f_in();
    j["hidden"] = model.params.hidden();
    j["w0"] = row_major(model.params.w0);
    j["b0"] = row_major(model.params.b0);
    j["w1"] = row_major(model.params.w1);
    j["b1"] = row_major(model.params.b1);

    nlohmann::ordered_json hyper;
    hyper["hidden"] = model.hyper.hidden;
    hyper["lr"] = model.hyper.lr;
    hyper["epochs"] = model.hyper.epochs;
    hyper["alphas"] = model.hyper.alphas;
    if (model.hyper.pos_weight.automatic) {
        hyper["pos_weight"] = "auto";
    } else {
        hyper["pos_weight"] = model.hyper.pos_weight.value;
    }
    hyper["init_seed"] = model.hyper.init_seed;
    j["hyper"] = std::move(hyper);
    j["loss_curve"] = model.loss_curve;
    return j;
}

GcnModel gcn_model_from_json(const nlohmann::json& j, const Graph& g) {
    try {
        if (j.value("format", "") != "srcloc-gcnsi") throw Error("not a GCNSI model document");
        const auto nodes = j.at("nodes").get<std::size_t>();
        if (nodes != g.num_nodes()) {
            throw Error(fmt::format("model was trained on {} nodes, graph has {}", nodes, g.num_nodes()));
        }
        const auto f_in = j.at("f_in").get<Eigen::Index>();
        const auto hidden = j.at("hidden").get<Eigen::Index>();

        GcnModel model;
        model.params.w0 = from_row_major(j.at("w0"), f_in, hidden);
        model.params.b0 = from_row_major(j.at("b0"), hidden, 1);
        model.params.w1 = from_row_major(j.at("w1"), hidden, 2);
        model.params.b1 = from_row_major(j.at("b1"), 2, 1);

        const auto& h = j.at("hyper");
        model.hyper.hidden = h.at("hidden").get<std::size_t>();
        model.hyper.lr = h.at("lr").get<double>();
        model.hyper.epochs = h.at("epochs").get<std::size_t>();
        model.hyper.alphas = h.at("alphas").get<std::vector<double>>();
        if (h.at("pos_weight").is_string()) {
            model.hyper.pos_weight = {true, 1.0};
        } else {
            model.hyper.pos_weight = {false, h.at("pos_weight").get<double>()};
        }
        model.hyper.init_seed = h.at("init_seed").get<std::uint64_t>();
        model.hyper.validate();
        if (static_cast<Eigen::Index>(model.hyper.num_features()) != f_in) {
            throw Error("model feature count does not match its alphas");
        }
        model.loss_curve = j.at("loss_curve").get<std::vector<double>>();
        model.a_hat = normalized_adjacency_with_self_loops(g);
        return model;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(fmt::format("malformed GCNSI model: {}", e.what()));
    }
}

void save_model(const std::string& path, const GcnModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write model '{}'", path));
    out << to_json(model).dump(2) << '\n';
}

GcnModel load_model(const std::string& path, const Graph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open model '{}'", path));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(fmt::format("malformed model '{}': {}", path, e.what()));
    }
    return gcn_model_from_json(j, g);
}

}  // namespace srcloc
