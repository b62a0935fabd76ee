#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"

#include "srcloc/diffusion.hpp"
#include "srcloc/error.hpp"
#include "srcloc/netsleuth.hpp"

using namespace srcloc;
using namespace srcloc::testing;

namespace {

// Two triangles joined by a path of `gap` uninfected nodes.
Graph distant_triangles(std::size_t gap) {
    Edges e{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
    NodeId prev = 2;
    for (NodeId v = 6; v < 6 + gap; ++v) {
        e.emplace_back(prev, v);
        prev = v;
    }
    e.emplace_back(prev, 3);
    return Graph::from_edges(6 + gap, e);
}

}  // namespace

TEST_SUITE("netsleuth") {

TEST_CASE("log-star code lengths") {
    const double c = std::log2(2.865064);
    CHECK(log_star(1) == doctest::Approx(c).epsilon(1e-15));
    CHECK(log_star(2) == doctest::Approx(c + 1.0).epsilon(1e-15));
    CHECK(log_star(4) == doctest::Approx(c + 2.0 + 1.0).epsilon(1e-15));
    CHECK(log_star(16) == doctest::Approx(c + 4.0 + 2.0 + 1.0).epsilon(1e-15));
    CHECK(log_star(3) == doctest::Approx(c + std::log2(3.0) + std::log2(std::log2(3.0))).epsilon(1e-15));
    CHECK_THROWS_AS(log_star(0), Error);
    for (std::size_t k = 1; k < 200; ++k) CHECK(log_star(k + 1) > log_star(k));
}

TEST_CASE("seed-set bits") {
    CHECK(seed_set_bits(5, 1) == doctest::Approx(log_star(1) + std::log2(5.0)).epsilon(1e-12));
    CHECK(seed_set_bits(6, 2) == doctest::Approx(log_star(2) + std::log2(15.0)).epsilon(1e-12));
    CHECK(seed_set_bits(7, 7) == doctest::Approx(log_star(7)).epsilon(1e-12));
    CHECK(seed_set_bits(1000, 3) ==
          doctest::Approx(log_star(3) + std::log2(1000.0 * 999.0 * 998.0 / 6.0)).epsilon(1e-12));
    CHECK_THROWS_AS(seed_set_bits(5, 0), Error);
    CHECK_THROWS_AS(seed_set_bits(5, 6), Error);
}

TEST_CASE("ripple bits by hand") {
    // P5 infected {1,2,3} seeded at 2: frontier {1,3} then {3}.
    Graph p5 = path_graph(5);
    Indicator inf = nodes(5, {1, 2, 3});
    CHECK(ripple_bits(p5, inf, {2}) == doctest::Approx(1.0).epsilon(1e-15));
    // Seeded at 1: frontier {2} then {3}.
    CHECK(ripple_bits(p5, inf, {1}) == 0.0);
    CHECK(ripple_bits(p5, inf, {1, 2, 3}) == 0.0);

    // Star all infected from the center: 4, 3, 2, 1 frontier sizes.
    Graph star = star_graph(4);
    CHECK(ripple_bits(star, all_nodes(star), {0}) == doctest::Approx(std::log2(24.0)).epsilon(1e-12));
    // From a leaf: frontier {0}, then the remaining three leaves.
    CHECK(ripple_bits(star, all_nodes(star), {1}) == doctest::Approx(std::log2(6.0)).epsilon(1e-12));

    // Unreachable infected node makes the ripple infinite.
    CHECK(std::isinf(ripple_bits(two_triangles(), all_nodes(two_triangles()), {0})));
    CHECK_THROWS_AS(ripple_bits(p5, inf, {0}), Error);
}

TEST_CASE("ripple prefers the node with most claimed neighbors") {
    // Square 0-1-2-3-0 with chord 1-3, plus pendant 4 on 2. Seeds {1}:
    // frontier {0,2,3}; 0 and 3 and 2 each have one claimed neighbor, pick 0
    // (lowest); then 3 has two claimed neighbors and wins over 2.
    Graph g = Graph::from_edges(5, Edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}, {2, 4}});
    double bits = ripple_bits(g, all_nodes(g), {1});
    // Frontier sizes: {0,2,3}=3, {2,3}=2, {2}=1, {4}=1.
    CHECK(bits == doctest::Approx(std::log2(3.0) + 1.0).epsilon(1e-12));
}

TEST_CASE("P5 middle infection picks node 2 and stops at one seed") {
    Graph g = path_graph(5);
    auto r = netsleuth(g, nodes(5, {1, 2, 3}), NetsleuthConfig{2, 1.0, {}});
    REQUIRE(r.mdl.seeds_in_order.size() == 2);
    CHECK(r.mdl.seeds_in_order[0] == 2);
    CHECK(r.mdl.chosen_k == 1);
    CHECK(members_of(r.prediction.sources) == std::vector<NodeId>{2});
    CHECK(r.mdl.cost_curve[0] == doctest::Approx(seed_set_bits(5, 1) + 1.0).epsilon(1e-12));
}

TEST_CASE("single infected node") {
    Graph g = builtin_karate();
    auto r = netsleuth(g, nodes(34, {17}));
    CHECK(r.mdl.seeds_in_order == std::vector<NodeId>{17});
    CHECK(r.mdl.chosen_k == 1);
    CHECK(r.prediction.sources == nodes(34, {17}));
    CHECK(r.prediction.scores[17] == 1.0);
}

TEST_CASE("two disjoint triangles with a two-seed budget") {
    Graph g = two_triangles();
    auto r = netsleuth(g, all_nodes(g), NetsleuthConfig{2, 1.0, {}});
    CHECK(std::isinf(r.mdl.cost_curve[0]));
    CHECK(std::isfinite(r.mdl.cost_curve[1]));
    CHECK(r.mdl.chosen_k == 2);
    auto src = members_of(r.prediction.sources);
    REQUIRE(src.size() == 2);
    CHECK(src[0] < 3);
    CHECK(src[1] >= 3);
}

TEST_CASE("far-apart infected triangles under default settings") {
    Graph g = distant_triangles(20);
    auto r = netsleuth(g, nodes(g.num_nodes(), {0, 1, 2, 3, 4, 5}));
    CHECK(std::isinf(r.mdl.cost_curve[0]));
    CHECK(r.mdl.chosen_k == 2);
    auto src = members_of(r.prediction.sources);
    REQUIRE(src.size() == 2);
    CHECK(src[0] < 3);
    CHECK(src[1] >= 3);
    CHECK(src[1] < 6);
}

TEST_CASE("far-apart infected stars") {
    // Two K1,3 stars, centers 0 and 4, joined through a long uninfected path.
    Edges e{{0, 1}, {0, 2}, {0, 3}, {4, 5}, {4, 6}, {4, 7}};
    NodeId prev = 3;
    for (NodeId v = 8; v < 40; ++v) {
        e.emplace_back(prev, v);
        prev = v;
    }
    e.emplace_back(prev, 5);
    Graph g = Graph::from_edges(40, e);
    auto r = netsleuth(g, nodes(40, {0, 1, 2, 3, 4, 5, 6, 7}));
    CHECK(std::isinf(r.mdl.cost_curve[0]));
    CHECK(r.mdl.chosen_k == 2);
    auto src = members_of(r.prediction.sources);
    REQUIRE(src.size() == 2);
    CHECK(src[0] < 4);
    CHECK(src[1] >= 4);
}

TEST_CASE("uncoverable budget is an error") {
    Graph g = two_triangles();
    CHECK_THROWS_WITH_AS(netsleuth(g, all_nodes(g), NetsleuthConfig{1, 1.0, {}}), "infected set not coverable", Error);
    CHECK_THROWS_AS(netsleuth(g, Indicator(6, 0)), Error);
}

TEST_CASE("chosen k is the first argmin and sources are infected") {
    Graph g = builtin_karate();
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        // A cascade from one seed keeps the infected subgraph connected.
        Indicator seed(34, 0);
        seed[rng() % 34] = 1;
        const double p = 0.2 + static_cast<double>(rng() % 5) / 10.0;
        Indicator inf = simulate_ic(g, seed, p, RunKey{rng()});
        NetsleuthConfig cfg;
        cfg.lambda_ripple = 0.25 + static_cast<double>(rng() % 8) / 4.0;
        auto r = netsleuth(g, inf, cfg);
        const auto& c = r.mdl.cost_curve;
        REQUIRE(r.mdl.chosen_k >= 1);
        std::size_t argmin = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i] < c[argmin]) argmin = i;
        CHECK(r.mdl.chosen_k == argmin + 1);
        CHECK(is_subset(r.prediction.sources, inf));
        CHECK(count_of(r.prediction.sources) == r.mdl.chosen_k);

        // Seeds are distinct and infected.
        Indicator seen(34, 0);
        for (NodeId s : r.mdl.seeds_in_order) {
            CHECK(inf[s] == 1);
            CHECK(seen[s] == 0);
            seen[s] = 1;
        }
        // Each finite cost recomputes from the published formula.
        for (std::size_t k = 1; k <= c.size(); ++k) {
            std::vector<NodeId> prefix(r.mdl.seeds_in_order.begin(), r.mdl.seeds_in_order.begin() + k);
            double ripple = ripple_bits(g, inf, prefix);
            if (std::isinf(ripple)) {
                CHECK(std::isinf(c[k - 1]));
            } else {
                CHECK(c[k - 1] == doctest::Approx(seed_set_bits(34, k) + cfg.lambda_ripple * ripple).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("scattered infections either succeed or report an uncoverable set") {
    Graph g = builtin_karate();
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        Indicator inf(34, 0);
        for (auto& b : inf) b = rng() % 3 == 0;
        inf[rng() % 34] = 1;
        try {
            auto r = netsleuth(g, inf);
            CHECK(std::isfinite(r.mdl.cost_curve[r.mdl.chosen_k - 1]));
            CHECK(r.mdl.chosen_k >= connected_components(g, inf).count);
        } catch (const Error& e) {
            CHECK(std::string(e.what()) == "infected set not coverable");
        }
    }
}

TEST_CASE("default seed budget") {
    Graph g = builtin_karate();
    auto r = netsleuth(g, all_nodes(g));
    CHECK(r.mdl.seeds_in_order.size() == 10);
    auto small = netsleuth(g, nodes(34, {0, 1, 2}));
    CHECK(small.mdl.seeds_in_order.size() == 3);
}

TEST_CASE("MDL report JSON writes infinite costs as null") {
    Graph g = two_triangles();
    auto r = netsleuth(g, all_nodes(g), NetsleuthConfig{2, 1.0, {}});
    auto j = to_json(r.mdl, g);
    CHECK(j["cost_curve"][0].is_null());
    CHECK(j["cost_curve"][1].is_number());
    CHECK(j["chosen_k"] == 2);
    CHECK(j["seeds_in_order"][0] == "0");
}

}
