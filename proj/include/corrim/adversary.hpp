#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "corrim/graph.hpp"
#include "corrim/ic.hpp"
#include "corrim/robust.hpp"

namespace corrim {

// Worst-case coupling of edge activations driven by one uniform draw q, built from the
// robust likelihoods pi of a seed set:
//
//   edge (k, j) with pi_k >  pi_j is live iff q is outside [pi_k - 1 + p_kj, pi_k]
//   edge (k, j) with pi_k <= pi_j is live iff 0 < q <= p_kj
//   active nodes V(q) = { i : q < pi_i }

struct CouplingDraw {
    double q = 0.0;
    LiveEdgeSample live;
    std::vector<NodeId> active;  // ascending
};

bool coupled_edge_live(const InfluenceProfile& prof, const Edge& edge, double q);

// Throws DomainError unless 0 <= q <= 1.
CouplingDraw draw_coupling(const DirectedGraph& g, const InfluenceProfile& prof, double q);

// Sorted breakpoints 0 = b_0 < ... < b_m = 1 between which the live-edge set and the
// active set are constant. Cells shorter than kMinCellWidth are merged.
struct BreakpointPartition {
    std::vector<double> points;

    std::size_t cell_count() const { return points.empty() ? 0 : points.size() - 1; }
    double lo(std::size_t c) const { return points[c]; }
    double hi(std::size_t c) const { return points[c + 1]; }
    double midpoint(std::size_t c) const { return 0.5 * (points[c] + points[c + 1]); }
};

inline constexpr double kMinCellWidth = 1e-15;

BreakpointPartition breakpoints(const DirectedGraph& g, const InfluenceProfile& prof);

// Sum over cells of width * |V(midpoint)|, in cell order.
double exact_expected_influence(const DirectedGraph& g, const InfluenceProfile& prof);

// Measure of { q in [0, 1] : edge is live }.
double edge_marginal(const InfluenceProfile& prof, const Edge& edge);

struct CellSummary {
    double q_lo;
    double q_hi;
    std::size_t active;
    std::size_t live_edges;
};

std::vector<CellSummary> cell_report(const DirectedGraph& g, const InfluenceProfile& prof);

struct ReachabilityCheck {
    bool holds = true;
    std::size_t cells_checked = 0;
    std::optional<CellSummary> counterexample;  // first failing cell
    std::vector<NodeId> missing;                // in V(q) but not reached
    std::vector<NodeId> extra;                  // reached but not in V(q)
};

// Compares V(q) with the nodes reachable from the seeds over E(q), at every cell midpoint.
ReachabilityCheck check_reachability_identity(const DirectedGraph& g, const InfluenceProfile& prof);

// For a best-path set of target i (pi_i > 0), checks at every cell midpoint that all
// paths are present exactly when q < pi_i, and that each path misses at most one arc.
bool check_path_dominance(const DirectedGraph& g, const InfluenceProfile& prof, const PathSet& paths);

// Writes "q,<q>", then "src,dst" rows for live edges, then "active_node" rows.
void write_coupling_csv(std::ostream& out, const DirectedGraph& g, const CouplingDraw& draw);
// q_lo,q_hi,active_count,live_edge_count
void write_cells_csv(std::ostream& out, const std::vector<CellSummary>& cells);
// src,dst,p,marginal,discrepancy
void write_marginals_csv(std::ostream& out, const DirectedGraph& g, const InfluenceProfile& prof);

}  // namespace corrim
