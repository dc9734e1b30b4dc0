#include "corrim/adversary.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "corrim/errors.hpp"

namespace corrim {

bool coupled_edge_live(const InfluenceProfile& prof, const Edge& edge, double q) {
    const double pk = prof.likelihood[edge.src];
    const double pj = prof.likelihood[edge.dst];
    if (pk > pj) return q < pk - 1.0 + edge.p || q > pk;
    return q > 0.0 && q <= edge.p;
}

namespace {

void check_profile(const DirectedGraph& g, const InfluenceProfile& prof) {
    if (prof.likelihood.size() != g.node_count())
        throw DomainError("influence profile does not match the graph");
}

std::size_t active_count(const InfluenceProfile& prof, double q) {
    return static_cast<std::size_t>(
        std::count_if(prof.likelihood.begin(), prof.likelihood.end(), [q](double pi) { return q < pi; }));
}

std::optional<EdgeId> find_edge(const DirectedGraph& g, NodeId from, NodeId to) {
    for (EdgeId e : g.out_edges(from))
        if (g.edge(e).dst == to) return e;
    return std::nullopt;
}

}  // namespace

CouplingDraw draw_coupling(const DirectedGraph& g, const InfluenceProfile& prof, double q) {
    check_profile(g, prof);
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("draw_coupling: q must lie in [0, 1]");
    CouplingDraw draw;
    draw.q = q;
    draw.live = LiveEdgeSample(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (coupled_edge_live(prof, g.edge(e), q)) draw.live.set(e, true);
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (q < prof.likelihood[v]) draw.active.push_back(v);
    return draw;
}

BreakpointPartition breakpoints(const DirectedGraph& g, const InfluenceProfile& prof) {
    check_profile(g, prof);
    std::vector<double> raw{0.0, 1.0};
    raw.insert(raw.end(), prof.likelihood.begin(), prof.likelihood.end());
    for (const auto& edge : g.edges()) {
        const double pk = prof.likelihood[edge.src];
        if (pk > prof.likelihood[edge.dst]) {
            raw.push_back(pk - 1.0 + edge.p);
            raw.push_back(pk);
        } else {
            raw.push_back(edge.p);
        }
    }
    for (double& x : raw) x = std::clamp(x, 0.0, 1.0);
    std::sort(raw.begin(), raw.end());

    BreakpointPartition part;
    part.points.push_back(0.0);
    for (double x : raw) {
        if (x - part.points.back() >= kMinCellWidth) part.points.push_back(x);
    }
    if (part.points.back() != 1.0) {
        // The last point sits within kMinCellWidth of 1; fold its cell into the previous one.
        if (part.points.size() > 1) part.points.back() = 1.0;
        else part.points.push_back(1.0);
    }
    return part;
}

double exact_expected_influence(const DirectedGraph& g, const InfluenceProfile& prof) {
    const auto part = breakpoints(g, prof);
    double total = 0.0;
    for (std::size_t c = 0; c < part.cell_count(); ++c)
        total += (part.hi(c) - part.lo(c)) * static_cast<double>(active_count(prof, part.midpoint(c)));
    return total;
}

double edge_marginal(const InfluenceProfile& prof, const Edge& edge) {
    const double pk = prof.likelihood[edge.src];
    if (pk > prof.likelihood[edge.dst]) {
        // Dead on [pk - 1 + p, pk]; inside [0, 1] that interval has length 1 - p.
        const double lo = pk - 1.0 + edge.p;
        return lo >= 0.0 ? edge.p : 1.0 - pk;
    }
    return edge.p;
}

std::vector<CellSummary> cell_report(const DirectedGraph& g, const InfluenceProfile& prof) {
    const auto part = breakpoints(g, prof);
    std::vector<CellSummary> cells;
    for (std::size_t c = 0; c < part.cell_count(); ++c) {
        const double q = part.midpoint(c);
        std::size_t live = 0;
        for (const auto& edge : g.edges()) live += coupled_edge_live(prof, edge, q);
        cells.push_back({part.lo(c), part.hi(c), active_count(prof, q), live});
    }
    return cells;
}

ReachabilityCheck check_reachability_identity(const DirectedGraph& g, const InfluenceProfile& prof) {
    const auto part = breakpoints(g, prof);
    ReachabilityCheck result;
    for (std::size_t c = 0; c < part.cell_count(); ++c) {
        const auto draw = draw_coupling(g, prof, part.midpoint(c));
        std::vector<char> reached(g.node_count(), 0);
        std::vector<NodeId> queue(prof.seeds.begin(), prof.seeds.end());
        for (NodeId s : prof.seeds) reached[s] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (EdgeId e : g.out_edges(queue[head])) {
                const NodeId w = g.edge(e).dst;
                if (!reached[w] && draw.live.live(e)) {
                    reached[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        ++result.cells_checked;
        std::vector<char> active(g.node_count(), 0);
        for (NodeId v : draw.active) active[v] = 1;
        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (active[v] && !reached[v]) result.missing.push_back(v);
            if (reached[v] && !active[v]) result.extra.push_back(v);
        }
        if (!result.missing.empty() || !result.extra.empty()) {
            std::size_t live = draw.live.live_count();
            result.holds = false;
            result.counterexample = CellSummary{part.lo(c), part.hi(c), draw.active.size(), live};
            break;
        }
    }
    return result;
}

bool check_path_dominance(const DirectedGraph& g, const InfluenceProfile& prof, const PathSet& paths) {
    if (paths.paths.empty()) return true;
    // Resolve arcs once.
    std::vector<std::vector<EdgeId>> arcs;
    for (const auto& path : paths.paths) {
        auto& ids = arcs.emplace_back();
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto e = find_edge(g, path[i], path[i + 1]);
            if (!e) return false;
            ids.push_back(*e);
        }
    }
    const double pi_target = prof.likelihood[paths.target];
    const auto part = breakpoints(g, prof);
    for (std::size_t c = 0; c < part.cell_count(); ++c) {
        const double q = part.midpoint(c);
        const bool should_exist = q < pi_target;
        for (const auto& ids : arcs) {
            std::size_t missing = 0;
            for (EdgeId e : ids) missing += !coupled_edge_live(prof, g.edge(e), q);
            if (missing > 1) return false;
            if ((missing == 0) != should_exist) return false;
        }
    }
    return true;
}

void write_coupling_csv(std::ostream& out, const DirectedGraph& g, const CouplingDraw& draw) {
    const auto old_precision = out.precision(17);
    out << "q," << draw.q << "\nsrc,dst\n";
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (draw.live.live(e)) out << g.original_id(g.edge(e).src) << ',' << g.original_id(g.edge(e).dst) << '\n';
    }
    out << "active_node\n";
    for (NodeId v : draw.active) out << g.original_id(v) << '\n';
    out.precision(old_precision);
}

void write_cells_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
    const auto old_precision = out.precision(17);
    out << "q_lo,q_hi,active_count,live_edge_count\n";
    for (const auto& c : cells) out << c.q_lo << ',' << c.q_hi << ',' << c.active << ',' << c.live_edges << '\n';
    out.precision(old_precision);
}

void write_marginals_csv(std::ostream& out, const DirectedGraph& g, const InfluenceProfile& prof) {
    const auto old_precision = out.precision(17);
    out << "src,dst,p,marginal,discrepancy\n";
    for (const auto& edge : g.edges()) {
        const double m = edge_marginal(prof, edge);
        out << g.original_id(edge.src) << ',' << g.original_id(edge.dst) << ',' << edge.p << ',' << m << ','
            << m - edge.p << '\n';
    }
    out.precision(old_precision);
}

}  // namespace corrim
