#include <doctest.h>

#include <sstream>

#include "corrim/analysis.hpp"
#include "corrim/errors.hpp"
#include "corrim/rng.hpp"
#include "corrim/robust.hpp"
#include "oracles.hpp"

using namespace corrim;

namespace {

// s -> a -> b, p = 0.75 on both edges.
DirectedGraph chain075() { return DirectedGraph(3, {{0, 1, 0.75}, {1, 2, 0.75}}); }

// s -> a -> t and s -> b -> t, all p = 0.75.
DirectedGraph diamond() {
    return DirectedGraph(4, {{0, 1, 0.75}, {0, 2, 0.75}, {1, 3, 0.75}, {2, 3, 0.75}});
}

}  // namespace

TEST_CASE("profile of the 0.75 chain") {
    const auto prof = influence_profile(chain075(), SeedSet({0}, 3));
    CHECK(prof.likelihood[0] == 1.0);
    CHECK(prof.likelihood[1] == 0.75);
    CHECK(prof.likelihood[2] == 0.5);
    CHECK(prof.distance[0] == 0.0);
    CHECK(prof.total == 2.25);
}

TEST_CASE("p = 1 everywhere gives likelihood one on the reachable part") {
    const DirectedGraph g(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {3, 4, 1.0}});
    const auto prof = influence_profile(g, SeedSet({1}, 5));
    CHECK(prof.likelihood[0] == 1.0);
    CHECK(prof.likelihood[1] == 1.0);
    CHECK(prof.likelihood[2] == 1.0);
    CHECK(prof.likelihood[3] == 0.0);
    CHECK(prof.likelihood[4] == 0.0);
    CHECK(prof.total == 3.0);
}

TEST_CASE("series graph n = 3") {
    const auto g = gen_series(3);
    const auto prof = influence_profile(g, SeedSet({0}, 3));
    CHECK(prof.likelihood[0] == 1.0);
    CHECK(prof.likelihood[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(prof.likelihood[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(f_corr(g, SeedSet({0}, 3)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("f_corr of the full node set and of the example tree") {
    const auto g = gen_poc_tree(4, 3);
    CHECK(f_corr(g, SeedSet::all(g.node_count())) == static_cast<double>(g.node_count()));
    CHECK(f_corr(g, SeedSet({0}, g.node_count())) == 3.0);
}

TEST_CASE("unreachable nodes have infinite distance") {
    const DirectedGraph g(3, {{0, 1, 0.5}});
    const auto prof = influence_profile(g, SeedSet({0}, 3), Pruning::none);
    CHECK(prof.distance[2] == kInfinity);
    CHECK(prof.likelihood[2] == 0.0);
    CHECK(f_corr(g, SeedSet({}, 3)) == 0.0);
}

TEST_CASE("pruning does not change likelihoods") {
    RngStream rng(5, 0);
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto g = gen_random(9, 20, t);
        const auto s = oracle::random_seeds(9, 1 + rng.below(3), rng);
        const auto a = influence_profile(g, s, Pruning::at_one);
        const auto b = influence_profile(g, s, Pruning::none);
        CHECK(a.likelihood == b.likelihood);
        CHECK(a.total == b.total);
    }
}

TEST_CASE("marginal gains on the 0.75 chain") {
    const auto g = chain075();
    const auto base = influence_profile(g, SeedSet({0}, 3));
    CHECK(marginal_gain_corr(g, base, 2) == 0.5);
    const auto empty = influence_profile(g, SeedSet({}, 3));
    CHECK(marginal_gain_corr(g, empty, 0) == 2.25);
    CHECK_THROWS_AS(marginal_gain_corr(g, base, 0), DomainError);

    const DirectedGraph sink(2, {{0, 1, 1.0}});
    const auto full = influence_profile(sink, SeedSet({0}, 2));
    CHECK(marginal_gain_corr(sink, full, 1) == 0.0);
}

TEST_CASE("incremental gain equals the from-scratch difference bit for bit") {
    RngStream rng(11, 0);
    for (std::uint64_t t = 0; t < 200; ++t) {
        const std::size_t n = 4 + rng.below(20);
        const auto g = gen_random(n, rng.below(n * 3), 1000 + t);
        const auto s = oracle::random_seeds(n, rng.below(4), rng);
        const auto base = influence_profile(g, s);
        RobustState state(g, s);
        for (NodeId v = 0; v < n; ++v) {
            if (s.contains(v)) continue;
            const double expected = f_corr(g, s.with(v)) - f_corr(g, s);
            CHECK(marginal_gain_corr(g, base, v) == expected);
            CHECK(state.marginal(v) == expected);
        }
    }
}

TEST_CASE("robust state follows seed additions") {
    RngStream rng(12, 0);
    for (std::uint64_t t = 0; t < 40; ++t) {
        const auto g = gen_random(15, 40, 2000 + t);
        RobustState state(g);
        SeedSet s;
        for (int step = 0; step < 6; ++step) {
            NodeId v;
            do v = static_cast<NodeId>(rng.below(15));
            while (s.contains(v));
            state.add_seed(v);
            s = s.with(v);
            const auto fresh = influence_profile(g, s);
            CHECK(state.value() == fresh.total);
            CHECK(state.profile().likelihood == fresh.likelihood);
        }
    }
}

TEST_CASE("f_corr basic properties") {
    RngStream rng(13, 0);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng.below(10);
        const auto g = gen_random(n, rng.below(2 * n), 3000 + t);
        const auto s = oracle::random_seeds(n, rng.below(n + 1), rng);
        const auto prof = influence_profile(g, s);
        CHECK(prof.total >= static_cast<double>(s.size()));
        bool all_far = true;
        for (NodeId v = 0; v < n; ++v) {
            CHECK(prof.likelihood[v] == likelihood_from_distance(prof.distance[v]));
            if (!s.contains(v) && prof.distance[v] < 1.0) all_far = false;
        }
        CHECK((prof.total == static_cast<double>(s.size())) == all_far);
        CHECK(verify_lp_feasibility(g, prof, 1e-9).empty());
    }
}

TEST_CASE("path oracle agrees on small DAGs") {
    RngStream rng(14, 0);
    for (std::uint64_t t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng.below(6);
        const auto g = oracle::random_dag(n, rng.below(13), t);
        const auto s = oracle::random_seeds(n, 1 + rng.below(2), rng);
        CHECK(influence_profile(g, s).likelihood == oracle::path_likelihoods(g, s));
    }
}

TEST_CASE("LP violations are reported") {
    const DirectedGraph g(2, {{0, 1, 0.5}});
    InfluenceProfile prof;
    prof.seeds = SeedSet({0}, 2);
    prof.distance = {0.0, kInfinity};
    prof.likelihood = {1.0, 0.0};
    auto v = verify_lp_feasibility(g, prof, 1e-12);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == LpViolation::Kind::edge_gap);
    CHECK(v[0].edge == 0);
    CHECK(v[0].excess == doctest::Approx(0.5));

    prof.likelihood = {0.9, 0.5};
    v = verify_lp_feasibility(g, prof, 1e-12);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == LpViolation::Kind::seed_not_one);

    prof.likelihood = {1.0, 1.2};
    v = verify_lp_feasibility(g, prof, 1e-12);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == LpViolation::Kind::out_of_bounds);
}

TEST_CASE("best paths") {
    const auto d = diamond();
    const auto ps = best_paths(d, SeedSet({0}, 4), 3);
    CHECK(ps.value == 0.5);
    REQUIRE(ps.paths.size() == 2);
    for (const auto& p : ps.paths) {
        CHECK(p.front() == 0);
        CHECK(p.back() == 3);
        CHECK(p.size() == 3);
    }
    CHECK(ps.paths[0] != ps.paths[1]);
    CHECK_FALSE(ps.truncated);

    const auto chain = best_paths(chain075(), SeedSet({0}, 3), 2);
    REQUIRE(chain.paths.size() == 1);
    CHECK(chain.paths[0] == std::vector<NodeId>{0, 1, 2});

    const DirectedGraph g(3, {{0, 1, 0.5}});
    const auto none = best_paths(g, SeedSet({0}, 3), 2);
    CHECK(none.paths.empty());
    CHECK(none.value == -kInfinity);

    const DirectedGraph weak(3, {{0, 1, 0.5}, {1, 2, 0.2}});
    const auto neg = best_paths(weak, SeedSet({0}, 3), 2);
    CHECK(neg.paths.empty());
    CHECK(neg.value == doctest::Approx(-0.3));

    CHECK_THROWS_AS(best_paths(d, SeedSet({0}, 4), 0), DomainError);
}

TEST_CASE("best path enumeration is capped and flagged") {
    // A ladder of p = 1 diamonds doubles the number of tied paths at each stage.
    std::vector<Edge> edges;
    const NodeId stages = 12;
    for (NodeId i = 0; i < stages; ++i) {
        const NodeId base = 3 * i;
        edges.push_back({base, base + 1, 1.0});
        edges.push_back({base, base + 2, 1.0});
        edges.push_back({base + 1, base + 3, 1.0});
        edges.push_back({base + 2, base + 3, 1.0});
    }
    const DirectedGraph g(3 * stages + 1, edges);
    const auto ps = best_paths(g, SeedSet({0}, g.node_count()), 3 * stages, 100);
    CHECK(ps.truncated);
    CHECK(ps.paths.size() == 100);
    const auto all = best_paths(g, SeedSet({0}, g.node_count()), 3 * stages);
    CHECK_FALSE(all.truncated);
    CHECK(all.paths.size() == 4096);
}

TEST_CASE("best paths all achieve the optimum") {
    RngStream rng(15, 0);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const std::size_t n = 4 + rng.below(6);
        const auto g = gen_random(n, 2 * n, 4000 + t);
        const SeedSet s({0}, n);
        const auto prof = influence_profile(g, s, Pruning::none);
        for (NodeId v = 1; v < n; ++v) {
            const auto ps = best_paths(g, s, v);
            if (prof.likelihood[v] == 0.0) {
                CHECK(ps.paths.empty());
                continue;
            }
            CHECK_FALSE(ps.paths.empty());
            for (const auto& path : ps.paths) {
                double d = 0.0;
                for (std::size_t i = 0; i + 1 < path.size(); ++i)
                    for (EdgeId e : g.out_edges(path[i]))
                        if (g.edge(e).dst == path[i + 1]) d += 1.0 - g.edge(e).p;
                CHECK(d == doctest::Approx(prof.distance[v]).epsilon(1e-12));
                CHECK(path.front() == 0);
                CHECK(path.back() == v);
            }
        }
    }
}

TEST_CASE("profile csv") {
    const DirectedGraph g(2, {{0, 1, 0.25}}, {7, 9});
    std::ostringstream out;
    write_profile_csv(out, g, influence_profile(g, SeedSet({0}, 2)));
    CHECK(out.str() == "node_id,d,pi\n7,0,1\n9,0.75,0.25\n");
}
