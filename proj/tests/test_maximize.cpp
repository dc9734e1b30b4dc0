#include <doctest.h>

#include <cmath>
#include <sstream>

#include "corrim/analysis.hpp"
#include "corrim/errors.hpp"
#include "corrim/ic.hpp"
#include "corrim/maximize.hpp"
#include "corrim/robust.hpp"

using namespace corrim;

namespace {

std::string selections(const GreedyTrace& t) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& s : t.steps) out << s.node << ',' << s.gain << ',' << s.cumulative << '\n';
    return out.str();
}

// value(S) = -|S|: decreasing, so the harness must flag it.
class Shrinking final : public InfluenceEvaluator {
public:
    explicit Shrinking(const DirectedGraph& g) : g_(&g) {}
    EvaluatorKind kind() const override { return EvaluatorKind::corr; }
    const DirectedGraph& graph() const override { return *g_; }
    double value(const SeedSet& s) override { return -static_cast<double>(s.size()); }
    void reset() override { s_ = SeedSet{}; }
    const SeedSet& current() const override { return s_; }
    double current_value() const override { return -static_cast<double>(s_.size()); }
    double marginal(NodeId) override { return -1.0; }
    void commit(NodeId v) override { s_ = s_.with(v); }

private:
    const DirectedGraph* g_;
    SeedSet s_;
};

// value(S) = |S|^2: monotone but supermodular.
class Squared final : public InfluenceEvaluator {
public:
    explicit Squared(const DirectedGraph& g) : g_(&g) {}
    EvaluatorKind kind() const override { return EvaluatorKind::corr; }
    const DirectedGraph& graph() const override { return *g_; }
    double value(const SeedSet& s) override { return static_cast<double>(s.size() * s.size()); }
    void reset() override { s_ = SeedSet{}; }
    const SeedSet& current() const override { return s_; }
    double current_value() const override { return static_cast<double>(s_.size() * s_.size()); }
    double marginal(NodeId) override { return static_cast<double>(2 * s_.size() + 1); }
    void commit(NodeId v) override { s_ = s_.with(v); }

private:
    const DirectedGraph* g_;
    SeedSet s_;
};

DirectedGraph star(std::size_t leaves, double p) {
    std::vector<Edge> edges;
    for (NodeId v = 1; v <= leaves; ++v) edges.push_back({0, v, p});
    return DirectedGraph(leaves + 1, edges);
}

}  // namespace

TEST_CASE("example tree, k = 1") {
    const auto g = gen_poc_tree(4, 3);
    auto corr = make_corr_evaluator(g);
    const auto t = greedy(*corr, 1);
    REQUIRE(t.steps.size() == 1);
    CHECK(g.labels()[t.steps[0].node] == 2);
    CHECK(t.value == 4.0);

    auto ic = make_ic_exact_evaluator(g);
    const auto ti = greedy(*ic, 1);
    CHECK(ti.steps[0].node == 0);
    CHECK(ti.value == 7.0);

    const auto ex = exhaustive_opt(*corr, 1);
    CHECK(ex.value == 4.0);
    CHECK(g.labels()[ex.seeds.ids()[0]] == 2);
    CHECK(ex.subsets == g.node_count());
}

TEST_CASE("k = |V| selects everything") {
    const auto g = gen_random(7, 12, 2);
    auto corr = make_corr_evaluator(g);
    const auto t = greedy(*corr, 7);
    CHECK(t.value == 7.0);
    CHECK(t.seeds(7) == SeedSet::all(7));
    CHECK(exhaustive_opt(*corr, 7).seeds == SeedSet::all(7));
    CHECK_THROWS_AS(greedy(*corr, 0), DomainError);
    CHECK_THROWS_AS(lazy_greedy(*corr, 8), DomainError);
}

TEST_CASE("star: centre first, then the smallest leaf") {
    const auto g = star(5, 0.5);
    auto corr = make_corr_evaluator(g);
    const auto t = lazy_greedy(*corr, 2);
    CHECK(t.steps[0].node == 0);
    CHECK(t.steps[1].node == 1);
    CHECK(selections(t) == selections(greedy(*corr, 2)));
}

TEST_CASE("zero-gain picks still fill the budget") {
    const DirectedGraph g(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    auto corr = make_corr_evaluator(g);
    const auto t = lazy_greedy(*corr, 3);
    REQUIRE(t.steps.size() == 3);
    CHECK(t.steps[0].node == 0);
    CHECK(t.steps[1].node == 1);
    CHECK(t.steps[1].gain == 0.0);
    CHECK(t.steps[2].node == 2);
}

TEST_CASE("exhaustive budget") {
    const auto g = gen_random(30, 60, 1);
    auto corr = make_corr_evaluator(g);
    CHECK_THROWS_AS(exhaustive_opt(*corr, 10, 1000), BudgetError);
    const auto r = exhaustive_opt(*corr, 2, 1000);
    CHECK(r.subsets == 435);
}

TEST_CASE("lazy greedy matches greedy and never evaluates more") {
    for (std::uint64_t t = 0; t < 60; ++t) {
        const std::size_t n = 6 + t % 20;
        const auto g = gen_random(n, 2 * n + t % 7, 100 + t);
        const std::size_t k = 1 + t % std::min<std::size_t>(n, 6);
        auto a = make_corr_evaluator(g);
        auto b = make_corr_evaluator(g);
        const auto plain = greedy(*a, k);
        const auto lazy = lazy_greedy(*b, k);
        CHECK(selections(plain) == selections(lazy));
        CHECK(plain.value == lazy.value);
        CHECK(lazy.evaluations <= plain.evaluations);
        for (std::size_t i = 1; i < plain.steps.size(); ++i)
            CHECK(plain.steps[i].gain <= plain.steps[i - 1].gain + kGainTieTolerance);
        CHECK(plain.value == f_corr(g, plain.seeds(n)));
    }
}

TEST_CASE("ic evaluators: lazy equals plain") {
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto g = gen_random(30, 90, 300 + t);
        auto a = make_ic_bank_evaluator(g, 200, t);
        auto b = make_ic_bank_evaluator(g, 200, t);
        const auto plain = greedy(*a, 5);
        const auto lazy = lazy_greedy(*b, 5);
        CHECK(selections(plain) == selections(lazy));
        CHECK(lazy.evaluations <= plain.evaluations);
        // The bank value of the chosen set is its estimate on the same samples.
        CHECK(plain.value == f_ic_estimate(g, plain.seeds(30), 200, t).mean);
    }
    const auto small = gen_random(6, 9, 4);
    auto a = make_ic_exact_evaluator(small);
    auto b = make_ic_exact_evaluator(small);
    CHECK(selections(greedy(*a, 3)) == selections(lazy_greedy(*b, 3)));
}

TEST_CASE("greedy is within 1 - 1/e of the optimum") {
    for (std::uint64_t t = 0; t < 40; ++t) {
        const std::size_t n = 4 + t % 7;
        const auto g = gen_random(n, n + t % 9, 600 + t);
        auto e = make_corr_evaluator(g);
        for (std::size_t k = 1; k <= 3 && k <= n; ++k) {
            const double opt = exhaustive_opt(*e, k).value;
            const double got = lazy_greedy(*e, k).value;
            CHECK(got >= (1.0 - 1.0 / std::exp(1.0)) * opt);
            CHECK(opt >= got);
        }
    }
}

TEST_CASE("marginals agree with value differences") {
    const auto g = gen_random(12, 30, 5);
    std::vector<std::unique_ptr<InfluenceEvaluator>> evaluators;
    evaluators.push_back(make_corr_evaluator(g));
    evaluators.push_back(make_ic_bank_evaluator(g, 100, 2));
    for (auto& e : evaluators) {
        e->commit(3);
        e->commit(7);
        const double base = e->current_value();
        CHECK(base == e->value(e->current()));
        std::vector<NodeId> cand{0, 1, 2, 4, 5};
        const auto batch = e->marginals(cand);
        for (std::size_t i = 0; i < cand.size(); ++i) {
            CHECK(batch[i] == e->marginal(cand[i]));
            CHECK(batch[i] == doctest::Approx(e->value(e->current().with(cand[i])) - base).epsilon(1e-12));
        }
        e->reset();
        CHECK(e->current().empty());
        CHECK(e->current_value() == 0.0);
    }
}

TEST_CASE("property harness") {
    for (std::uint64_t t = 0; t < 5; ++t) {
        const auto g = gen_random(10, 25, 70 + t);
        auto corr = make_corr_evaluator(g);
        CHECK(check_submodular_monotone(*corr, 40, t).ok());
        const auto small = gen_random(7, 10, 80 + t);
        auto ic = make_ic_exact_evaluator(small);
        CHECK(check_submodular_monotone(*ic, 20, t).ok());
    }
    const auto g = gen_random(6, 8, 1);
    Shrinking broken(g);
    const auto rep = check_submodular_monotone(broken, 20, 1);
    CHECK(rep.monotonicity_violations > 0);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.details.empty());
    Squared convex(g);
    CHECK(check_submodular_monotone(convex, 20, 1).submodularity_violations > 0);
}

TEST_CASE("trace csv") {
    const auto g = gen_poc_tree(2, 1);
    auto corr = make_corr_evaluator(g);
    const auto t = lazy_greedy(*corr, 2);
    std::ostringstream a, b;
    write_trace_csv(a, g, t, false);
    write_trace_csv(b, g, lazy_greedy(*corr, 2), false);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("step,node_id,gain,cumulative_value,evaluations,elapsed_ms\n1,", 0) == 0);
    CHECK(to_string(EvaluatorKind::ic_bank) == "ic-bank");
}
