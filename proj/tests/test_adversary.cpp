#include <doctest.h>

#include <sstream>

#include "corrim/adversary.hpp"
#include "corrim/analysis.hpp"
#include "corrim/errors.hpp"
#include "corrim/rng.hpp"
#include "oracles.hpp"

using namespace corrim;

namespace {

DirectedGraph chain075() { return DirectedGraph(3, {{0, 1, 0.75}, {1, 2, 0.75}}); }

}  // namespace

TEST_CASE("single edge draw") {
    const DirectedGraph g(2, {{0, 1, 0.1}});
    const auto prof = influence_profile(g, SeedSet({0}, 2));
    const auto draw = draw_coupling(g, prof, 0.05);
    CHECK(draw.live.live(0));
    CHECK(draw.active == std::vector<NodeId>{0, 1});
    // pi_j = 1 - (1 - 0.1) differs from 0.1 by one ulp; the sliver cell is merged.
    const auto points = breakpoints(g, prof).points;
    REQUIRE(points.size() == 3);
    CHECK(points[0] == 0.0);
    CHECK(points[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(points[2] == 1.0);
}

TEST_CASE("chain draws") {
    const auto g = chain075();
    const auto prof = influence_profile(g, SeedSet({0}, 3));
    const auto draw = draw_coupling(g, prof, 0.6);
    CHECK(draw.live.live(0));
    CHECK_FALSE(draw.live.live(1));
    CHECK(draw.active == std::vector<NodeId>{0, 1});

    const auto late = draw_coupling(g, prof, 0.999);
    CHECK(late.active == std::vector<NodeId>{0});

    CHECK_THROWS_AS(draw_coupling(g, prof, -0.1), DomainError);
    CHECK_THROWS_AS(draw_coupling(g, prof, 1.1), DomainError);
}

TEST_CASE("chain breakpoints, expectation and identities") {
    const auto g = chain075();
    const auto prof = influence_profile(g, SeedSet({0}, 3));
    CHECK(breakpoints(g, prof).points == std::vector<double>{0.0, 0.5, 0.75, 1.0});
    CHECK(exact_expected_influence(g, prof) == 2.25);
    const auto check = check_reachability_identity(g, prof);
    CHECK(check.holds);
    CHECK(check.cells_checked == 3);
    const auto paths = best_paths(g, SeedSet({0}, 3), 2);
    CHECK(check_path_dominance(g, prof, paths));
    for (const auto& e : g.edges()) CHECK(edge_marginal(prof, e) == e.p);
}

TEST_CASE("partition with no edges") {
    const DirectedGraph g(2, {});
    const auto prof = influence_profile(g, SeedSet({0}, 2));
    CHECK(breakpoints(g, prof).points == std::vector<double>{0.0, 1.0});
    CHECK(exact_expected_influence(g, prof) == 1.0);
}

TEST_CASE("expectation for the full set and the series graph") {
    const auto t = gen_poc_tree(4, 3);
    const auto all = influence_profile(t, SeedSet::all(t.node_count()));
    CHECK(exact_expected_influence(t, all) == static_cast<double>(t.node_count()));
    const auto s = gen_series(3);
    CHECK(exact_expected_influence(s, influence_profile(s, SeedSet({0}, 3))) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("clipped removal interval inflates the marginal") {
    const DirectedGraph g(3, {{0, 1, 0.1}, {1, 2, 0.5}});
    const auto prof = influence_profile(g, SeedSet({0}, 3));
    CHECK(edge_marginal(prof, g.edge(0)) == doctest::Approx(0.1));
    CHECK(edge_marginal(prof, g.edge(1)) == doctest::Approx(0.9));
    std::ostringstream out;
    write_marginals_csv(out, g, prof);
    CHECK(out.str().find("0.4") != std::string::npos);
}

TEST_CASE("all p = 1 keeps every edge live") {
    const DirectedGraph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {2, 3, 1.0}});
    const auto prof = influence_profile(g, SeedSet({1}, 4));
    CHECK(exact_expected_influence(g, prof) == 4.0);
    CHECK(check_reachability_identity(g, prof).holds);
}

TEST_CASE("diamond paths appear together") {
    const DirectedGraph g(4, {{0, 1, 0.75}, {0, 2, 0.75}, {1, 3, 0.75}, {2, 3, 0.75}});
    const auto prof = influence_profile(g, SeedSet({0}, 4));
    const auto paths = best_paths(g, SeedSet({0}, 4), 3);
    REQUIRE(paths.paths.size() == 2);
    CHECK(check_path_dominance(g, prof, paths));
    const DirectedGraph single(2, {{0, 1, 0.3}});
    const auto sp = influence_profile(single, SeedSet({0}, 2));
    CHECK(check_path_dominance(single, sp, best_paths(single, SeedSet({0}, 2), 1)));
}

TEST_CASE("random instances: expectation, marginals, partition") {
    RngStream rng(21, 0);
    for (std::uint64_t t = 0; t < 150; ++t) {
        const std::size_t n = 2 + rng.below(7);
        const auto g = gen_random(n, rng.below(std::min<std::size_t>(17, n * (n - 1) + 1)), 500 + t);
        const auto s = oracle::random_seeds(n, 1 + rng.below(2), rng);
        const auto prof = influence_profile(g, s);
        CHECK(exact_expected_influence(g, prof) == doctest::Approx(prof.total).epsilon(1e-12));

        const auto part = breakpoints(g, prof);
        CHECK(part.points.front() == 0.0);
        CHECK(part.points.back() == 1.0);
        for (std::size_t i = 1; i < part.points.size(); ++i) CHECK(part.points[i] > part.points[i - 1]);

        for (const auto& e : g.edges()) {
            const double pk = prof.likelihood[e.src];
            const bool unclipped = pk <= prof.likelihood[e.dst] || pk - 1.0 + e.p >= 0.0;
            if (unclipped) CHECK(edge_marginal(prof, e) == e.p);
            else CHECK(edge_marginal(prof, e) > e.p);
        }

        // V(q) shrinks as q grows and always holds the seeds below 1.
        std::size_t previous = n + 1;
        for (std::size_t c = 0; c < part.cell_count(); ++c) {
            const auto draw = draw_coupling(g, prof, part.midpoint(c));
            CHECK(draw.active.size() <= previous);
            previous = draw.active.size();
            for (NodeId v : s) CHECK(std::binary_search(draw.active.begin(), draw.active.end(), v));
        }
        for (NodeId v = 0; v < n; ++v) {
            if (s.contains(v) || prof.likelihood[v] == 0.0) continue;
            CHECK(check_path_dominance(g, prof, best_paths(g, s, v)));
        }
    }
}

TEST_CASE("Monte Carlo over q converges to the exact expectation") {
    const auto g = gen_random(8, 16, 99);
    const auto prof = influence_profile(g, SeedSet({0, 3}, 8));
    RngStream rng(1, 0);
    const std::size_t draws = 100'000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = static_cast<double>(draw_coupling(g, prof, rng.uniform01()).active.size());
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
    CHECK(std::abs(mean - exact_expected_influence(g, prof)) <= 3.0 * se);
}

TEST_CASE("coupling csv writers") {
    const auto g = chain075();
    const auto prof = influence_profile(g, SeedSet({0}, 3));
    std::ostringstream draw;
    write_coupling_csv(draw, g, draw_coupling(g, prof, 0.6));
    CHECK(draw.str() == "q,0.59999999999999998\nsrc,dst\n0,1\nactive_node\n0\n1\n");
    std::ostringstream cells;
    write_cells_csv(cells, cell_report(g, prof));
    CHECK(cells.str() == "q_lo,q_hi,active_count,live_edge_count\n0,0.5,3,2\n0.5,0.75,2,1\n0.75,1,1,1\n");
}
