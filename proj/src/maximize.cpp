#include "corrim/maximize.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "corrim/errors.hpp"
#include "corrim/ic.hpp"
#include "corrim/rng.hpp"
#include "corrim/robust.hpp"

namespace corrim {

std::string to_string(EvaluatorKind kind) {
    switch (kind) {
        case EvaluatorKind::corr: return "corr";
        case EvaluatorKind::ic_bank: return "ic-bank";
        case EvaluatorKind::ic_exact: return "ic-exact";
    }
    return "?";
}

std::vector<double> InfluenceEvaluator::marginals(std::span<const NodeId> candidates) {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (NodeId v : candidates) out.push_back(marginal(v));
    return out;
}

namespace {

class CorrEvaluator final : public InfluenceEvaluator {
public:
    explicit CorrEvaluator(const DirectedGraph& g) : g_(g), state_(g) {}

    EvaluatorKind kind() const override { return EvaluatorKind::corr; }
    const DirectedGraph& graph() const override { return g_; }
    double value(const SeedSet& s) override { return f_corr(g_, s); }
    void reset() override { state_ = RobustState(g_); }
    const SeedSet& current() const override { return state_.profile().seeds; }
    double current_value() const override { return state_.value(); }
    double marginal(NodeId v) override { return state_.marginal(v); }
    void commit(NodeId v) override { state_.add_seed(v); }

private:
    const DirectedGraph& g_;
    RobustState state_;
};

class IcExactEvaluator final : public InfluenceEvaluator {
public:
    IcExactEvaluator(const DirectedGraph& g, std::size_t edge_limit)
        : g_(g), edge_limit_(edge_limit), value_(f_ic_exact(g, current_, edge_limit)) {}

    EvaluatorKind kind() const override { return EvaluatorKind::ic_exact; }
    const DirectedGraph& graph() const override { return g_; }
    double value(const SeedSet& s) override { return f_ic_exact(g_, s, edge_limit_); }
    void reset() override {
        current_ = SeedSet{};
        value_ = f_ic_exact(g_, current_, edge_limit_);
    }
    const SeedSet& current() const override { return current_; }
    double current_value() const override { return value_; }
    double marginal(NodeId v) override { return f_ic_exact(g_, current_.with(v), edge_limit_) - value_; }
    void commit(NodeId v) override {
        current_ = current_.with(v);
        value_ = f_ic_exact(g_, current_, edge_limit_);
    }

private:
    const DirectedGraph& g_;
    std::size_t edge_limit_;
    SeedSet current_;
    double value_;
};

class IcBankEvaluator final : public InfluenceEvaluator {
public:
    IcBankEvaluator(const DirectedGraph& g, std::size_t samples, std::uint64_t seed)
        : g_(g), bank_(g, samples, seed) {}

    EvaluatorKind kind() const override { return EvaluatorKind::ic_bank; }
    const DirectedGraph& graph() const override { return g_; }
    double value(const SeedSet& s) override { return bank_.estimate(s).mean; }
    void reset() override {
        bank_.reset();
        current_ = SeedSet{};
    }
    const SeedSet& current() const override { return current_; }
    double current_value() const override { return bank_.value(); }
    double marginal(NodeId v) override { return bank_.marginal_gain(v); }
    void commit(NodeId v) override {
        current_ = current_.with(v);
        bank_.commit(v);
    }

    std::vector<double> marginals(std::span<const NodeId> candidates) override {
        if (candidates.size() * 8 < g_.node_count()) return InfluenceEvaluator::marginals(candidates);
        const auto counts = bank_.all_gain_counts();
        std::vector<double> out;
        out.reserve(candidates.size());
        const auto r = static_cast<double>(bank_.samples());
        for (NodeId v : candidates) out.push_back(static_cast<double>(counts[v]) / r);
        return out;
    }

private:
    const DirectedGraph& g_;
    SampleBank bank_;
    SeedSet current_;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_budget(const InfluenceEvaluator& e, std::size_t k) {
    const auto n = e.graph().node_count();
    if (k < 1 || k > n)
        throw DomainError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
}

}  // namespace

std::unique_ptr<InfluenceEvaluator> make_corr_evaluator(const DirectedGraph& g) {
    return std::make_unique<CorrEvaluator>(g);
}

std::unique_ptr<InfluenceEvaluator> make_ic_exact_evaluator(const DirectedGraph& g, std::size_t edge_limit) {
    return std::make_unique<IcExactEvaluator>(g, edge_limit);
}

std::unique_ptr<InfluenceEvaluator> make_ic_bank_evaluator(const DirectedGraph& g, std::size_t samples,
                                                           std::uint64_t seed) {
    return std::make_unique<IcBankEvaluator>(g, samples, seed);
}

SeedSet GreedyTrace::seeds(std::size_t node_count) const {
    std::vector<NodeId> ids;
    for (const auto& s : steps) ids.push_back(s.node);
    return SeedSet(std::move(ids), node_count);
}

GreedyTrace greedy(InfluenceEvaluator& e, std::size_t k) {
    check_budget(e, k);
    const auto start = Clock::now();
    const auto n = e.graph().node_count();
    e.reset();
    GreedyTrace trace;
    trace.kind = e.kind();
    std::vector<NodeId> candidates;
    for (std::size_t round = 0; round < k; ++round) {
        candidates.clear();
        for (NodeId v = 0; v < n; ++v)
            if (!e.current().contains(v)) candidates.push_back(v);
        const auto gains = e.marginals(candidates);
        trace.evaluations += candidates.size();
        const double best = *std::max_element(gains.begin(), gains.end());
        std::size_t pick = 0;
        while (gains[pick] < best - kGainTieTolerance) ++pick;
        e.commit(candidates[pick]);
        trace.steps.push_back(
            {candidates[pick], gains[pick], e.current_value(), trace.evaluations, ms_since(start)});
    }
    trace.value = e.current_value();
    trace.elapsed_ms = ms_since(start);
    return trace;
}

GreedyTrace lazy_greedy(InfluenceEvaluator& e, std::size_t k) {
    check_budget(e, k);
    const auto start = Clock::now();
    const auto n = e.graph().node_count();
    e.reset();
    GreedyTrace trace;
    trace.kind = e.kind();

    struct Entry {
        double bound;
        NodeId node;
        std::size_t round;  // round in which bound was last evaluated
    };
    auto lower_priority = [](const Entry& a, const Entry& b) {
        return a.bound < b.bound || (a.bound == b.bound && a.node > b.node);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);

    std::vector<NodeId> all(n);
    for (NodeId v = 0; v < n; ++v) all[v] = v;
    const auto initial = e.marginals(all);
    trace.evaluations = n;
    for (NodeId v = 0; v < n; ++v) heap.push({initial[v], v, 0});

    std::vector<Entry> band;
    for (std::size_t round = 0; round < k; ++round) {
        while (true) {
            Entry top = heap.top();
            if (top.round != round) {
                heap.pop();
                top.bound = e.marginal(top.node);
                top.round = round;
                ++trace.evaluations;
                heap.push(top);
                continue;
            }
            // The fresh top holds the largest gain. Everything within the tie band must
            // be fresh before the smallest id can be chosen.
            const double best = top.bound;
            band.clear();
            while (!heap.empty() && heap.top().bound >= best - kGainTieTolerance) {
                band.push_back(heap.top());
                heap.pop();
            }
            bool exceeded = false;
            for (auto& entry : band) {
                if (entry.round != round) {
                    entry.bound = e.marginal(entry.node);
                    entry.round = round;
                    ++trace.evaluations;
                    exceeded |= entry.bound > best;
                }
            }
            if (exceeded) {  // objective not submodular here; fall back to re-ranking
                for (const auto& entry : band) heap.push(entry);
                continue;
            }
            auto pick = band.end();
            for (auto it = band.begin(); it != band.end(); ++it) {
                if (it->bound >= best - kGainTieTolerance && (pick == band.end() || it->node < pick->node))
                    pick = it;
            }
            const Entry chosen = *pick;
            for (auto it = band.begin(); it != band.end(); ++it)
                if (it != pick) heap.push(*it);
            e.commit(chosen.node);
            trace.steps.push_back(
                {chosen.node, chosen.bound, e.current_value(), trace.evaluations, ms_since(start)});
            break;
        }
    }
    trace.value = e.current_value();
    trace.elapsed_ms = ms_since(start);
    return trace;
}

ExhaustiveResult exhaustive_opt(InfluenceEvaluator& e, std::size_t k, std::size_t budget) {
    const std::size_t n = e.graph().node_count();
    if (k > n) throw DomainError("k exceeds the number of nodes");
    // C(n, k) with saturation at budget + 1.
    std::size_t subsets = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const auto num = static_cast<long double>(subsets) * static_cast<long double>(n - i) /
                         static_cast<long double>(i + 1);
        if (num > static_cast<long double>(budget)) {
            throw BudgetError("exhaustive_opt: C(" + std::to_string(n) + ", " + std::to_string(k) +
                              ") subsets exceed the budget of " + std::to_string(budget));
        }
        subsets = subsets * (n - i) / (i + 1);
    }

    ExhaustiveResult best;
    best.value = -std::numeric_limits<double>::infinity();
    std::vector<NodeId> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<NodeId>(i);
    while (true) {
        SeedSet s(pick, n);
        const double value = e.value(s);
        ++best.subsets;
        if (value > best.value + kGainTieTolerance) {
            best.value = value;
            best.seeds = std::move(s);
        }
        // Next combination in lexicographic order.
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

SubmodularityReport check_submodular_monotone(InfluenceEvaluator& e, std::size_t trials,
                                              std::uint64_t seed, double tol) {
    SubmodularityReport report;
    const std::size_t n = e.graph().node_count();
    if (n == 0) return report;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(seed, t);
        const auto v = static_cast<NodeId>(rng.below(n));
        std::vector<NodeId> small, large;
        for (NodeId u = 0; u < n; ++u) {
            if (u == v || !rng.bernoulli(0.5)) continue;
            large.push_back(u);
            if (rng.bernoulli(0.5)) small.push_back(u);
        }
        const SeedSet s(small, n), big(large, n);
        const double fs = e.value(s), ft = e.value(big);
        const double fsv = e.value(s.with(v)), ftv = e.value(big.with(v));
        ++report.trials;

        auto describe = [&](const char* what, double lhs, double rhs) {
            std::ostringstream os;
            os << std::setprecision(17) << "trial " << t << ": " << what << " (" << lhs << " vs " << rhs
               << "), |S|=" << s.size() << " |T|=" << big.size() << " v=" << v;
            report.details.push_back(os.str());
        };
        if (fs > ft + tol || fsv > ftv + tol || fs > fsv + tol) {
            ++report.monotonicity_violations;
            describe("monotonicity", fs, ft);
        }
        if (fsv - fs < ftv - ft - tol) {
            ++report.submodularity_violations;
            describe("diminishing returns", fsv - fs, ftv - ft);
        }
    }
    return report;
}

void write_trace_csv(std::ostream& out, const DirectedGraph& g, const GreedyTrace& trace,
                     bool include_timing) {
    const auto old_precision = out.precision(17);
    out << "step,node_id,gain,cumulative_value,evaluations,elapsed_ms\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        out << i + 1 << ',' << g.original_id(s.node) << ',' << s.gain << ',' << s.cumulative << ','
            << s.evaluations << ',' << (include_timing ? s.elapsed_ms : 0.0) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace corrim
