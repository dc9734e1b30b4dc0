#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "corrim/graph.hpp"

namespace corrim {

// Gains closer than this are treated as ties, broken by the smallest node id.
inline constexpr double kGainTieTolerance = 1e-12;
inline constexpr std::size_t kDefaultSubsetBudget = 1'000'000;

enum class EvaluatorKind { corr, ic_bank, ic_exact };

std::string to_string(EvaluatorKind kind);

// Influence objective with an internal seed-set state for greedy-style search.
//
// marginal(v) is value(S + v) - value(S) for the current state S: bit-exact for the
// corr and ic_exact kinds, exact per fixed sample bank for ic_bank.
class InfluenceEvaluator {
public:
    virtual ~InfluenceEvaluator() = default;

    virtual EvaluatorKind kind() const = 0;
    virtual const DirectedGraph& graph() const = 0;

    // Stateless evaluation of an arbitrary seed set.
    virtual double value(const SeedSet& s) = 0;

    virtual void reset() = 0;
    virtual const SeedSet& current() const = 0;
    virtual double current_value() const = 0;
    virtual double marginal(NodeId v) = 0;
    virtual void commit(NodeId v) = 0;

    // Marginals of many candidates against the current state. The default loops over
    // marginal(); implementations may batch.
    virtual std::vector<double> marginals(std::span<const NodeId> candidates);
};

std::unique_ptr<InfluenceEvaluator> make_corr_evaluator(const DirectedGraph& g);
std::unique_ptr<InfluenceEvaluator> make_ic_exact_evaluator(const DirectedGraph& g,
                                                            std::size_t edge_limit = 20);
std::unique_ptr<InfluenceEvaluator> make_ic_bank_evaluator(const DirectedGraph& g, std::size_t samples,
                                                           std::uint64_t seed);

struct GreedyStep {
    NodeId node;
    double gain;
    double cumulative;
    std::size_t evaluations;  // marginal evaluations spent so far
    double elapsed_ms;        // since the start of the run
};

struct GreedyTrace {
    EvaluatorKind kind = EvaluatorKind::corr;
    std::vector<GreedyStep> steps;
    double value = 0.0;
    std::size_t evaluations = 0;
    double elapsed_ms = 0.0;

    SeedSet seeds(std::size_t node_count) const;
};

// k rounds of exact argmax over all non-selected nodes. Throws DomainError unless 1 <= k <= |V|.
GreedyTrace greedy(InfluenceEvaluator& e, std::size_t k);

// Accelerated greedy with stale upper bounds. Same selections and gains as greedy()
// for a submodular objective, using no more marginal evaluations.
GreedyTrace lazy_greedy(InfluenceEvaluator& e, std::size_t k);

struct ExhaustiveResult {
    SeedSet seeds;
    double value = 0.0;
    std::size_t subsets = 0;
};

// Best k-subset by enumeration; the lexicographically smallest one among ties.
// Throws BudgetError when C(|V|, k) exceeds budget.
ExhaustiveResult exhaustive_opt(InfluenceEvaluator& e, std::size_t k,
                                std::size_t budget = kDefaultSubsetBudget);

struct SubmodularityReport {
    std::size_t trials = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t submodularity_violations = 0;
    std::vector<std::string> details;

    bool ok() const { return monotonicity_violations == 0 && submodularity_violations == 0; }
};

// Random chains S subset T and v outside T; checks value(S) <= value(T) and
// value(S+v) - value(S) >= value(T+v) - value(T), both up to tol.
SubmodularityReport check_submodular_monotone(InfluenceEvaluator& e, std::size_t trials,
                                              std::uint64_t seed, double tol = kGainTieTolerance);

// step,node_id,gain,cumulative_value,evaluations,elapsed_ms (original ids).
void write_trace_csv(std::ostream& out, const DirectedGraph& g, const GreedyTrace& trace,
                     bool include_timing = true);

}  // namespace corrim
