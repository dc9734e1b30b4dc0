#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "corrim/graph.hpp"

namespace corrim {

// Absolute tolerance used when deciding whether an edge is tight (d_j == d_i + 1 - p_ij).
inline constexpr double kTightTolerance = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Default cap on the number of best paths enumerated for one target.
inline constexpr std::size_t kDefaultPathCap = 10'000;

enum class Pruning {
    at_one,  // nodes at distance >= 1 are not expanded; their d is only an upper bound
    none,    // exact distances everywhere
};

// Robust influence likelihoods for one seed set.
//
// distance[i] is the shortest-path distance from the seed set under edge weights 1 - p
// (+inf when unreachable), likelihood[i] = clamp(1 - distance[i], 0, 1) and total is
// the sum of likelihoods taken in node order. That sum is the correlation-robust
// influence of the seed set.
struct InfluenceProfile {
    SeedSet seeds;
    std::vector<double> distance;
    std::vector<double> likelihood;
    double total = 0.0;
};

// Sums in index order. Every f_corr value in the library goes through this so that
// incremental and from-scratch evaluations round identically.
double likelihood_sum(std::span<const double> likelihood);

inline double likelihood_from_distance(double d) { return d < 1.0 ? 1.0 - d : 0.0; }

InfluenceProfile influence_profile(const DirectedGraph& g, const SeedSet& s,
                                   Pruning pruning = Pruning::at_one);

double f_corr(const DirectedGraph& g, const SeedSet& s);

// f_corr(S + v) - f_corr(S), found by relaxing only the nodes whose distance improves.
// Bit-identical to the from-scratch difference. Throws DomainError if v is a seed.
double marginal_gain_corr(const DirectedGraph& g, const InfluenceProfile& base, NodeId v);

// Incrementally maintained profile for a growing seed set (used by the greedy
// maximizers). Not thread-safe: marginal() uses internal scratch buffers.
class RobustState {
public:
    explicit RobustState(const DirectedGraph& g);
    RobustState(const DirectedGraph& g, const SeedSet& s);
    RobustState(const DirectedGraph& g, InfluenceProfile profile);

    const InfluenceProfile& profile() const noexcept { return profile_; }
    double value() const noexcept { return profile_.total; }

    double marginal(NodeId v);
    void add_seed(NodeId v);

private:
    // Fills changed_ with nodes whose distance improves once v becomes a seed.
    void relax_from(NodeId v);

    const DirectedGraph* graph_;
    InfluenceProfile profile_;
    std::vector<double> scratch_;
    std::vector<NodeId> changed_;
    std::vector<double> changed_distance_;
    std::vector<double> tentative_;
    std::vector<NodeId> touched_;
};

// ---------------------------------------------------------------------------

struct LpViolation {
    enum class Kind { seed_not_one, edge_gap, out_of_bounds };
    Kind kind;
    NodeId node = 0;   // offending node (source node for edge_gap)
    EdgeId edge = 0;   // only meaningful for edge_gap
    double excess = 0.0;
};

// Checks pi_s = 1 for seeds, pi_i - pi_j <= 1 - p_ij for every edge, 0 <= pi_i <= 1.
// Returns an empty list iff every constraint holds within tol.
std::vector<LpViolation> verify_lp_feasibility(const DirectedGraph& g,
                                               const InfluenceProfile& profile, double tol);

// ---------------------------------------------------------------------------

struct PathSet {
    NodeId target = 0;
    double value = -kInfinity;               // best 1 - sum(1 - p); 1 - d_target
    std::vector<std::vector<NodeId>> paths;  // seed first, target last
    bool truncated = false;
};

// All paths from the seed set to target that achieve the best value, found by walking
// tight edges backwards from target. Each path starts at a seed and has no other seed
// on it. Empty when the best value is <= 0. Throws DomainError if target is a seed.
PathSet best_paths(const DirectedGraph& g, const SeedSet& s, NodeId target,
                   std::size_t cap = kDefaultPathCap);

// node_id,d,pi with original node ids.
void write_profile_csv(std::ostream& out, const DirectedGraph& g, const InfluenceProfile& profile);

}  // namespace corrim
