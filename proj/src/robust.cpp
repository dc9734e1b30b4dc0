#include "corrim/robust.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>
#include <utility>

#include "corrim/errors.hpp"

namespace corrim {

namespace {

inline double edge_weight(const Edge& e) { return 1.0 - e.p; }

using HeapEntry = std::pair<double, NodeId>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

}  // namespace

double likelihood_sum(std::span<const double> likelihood) {
    double total = 0.0;
    for (double pi : likelihood) total += pi;
    return total;
}

InfluenceProfile influence_profile(const DirectedGraph& g, const SeedSet& s, Pruning pruning) {
    const std::size_t n = g.node_count();
    if (!s.empty() && s.ids().back() >= n) throw DomainError("seed set does not fit the graph");

    InfluenceProfile prof;
    prof.seeds = s;
    prof.distance.assign(n, kInfinity);
    std::vector<char> settled(n, 0);
    MinHeap heap;
    for (NodeId v : s) {
        prof.distance[v] = 0.0;
        heap.emplace(0.0, v);
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u] || d > prof.distance[u]) continue;
        settled[u] = 1;
        if (pruning == Pruning::at_one && d >= 1.0) continue;
        for (EdgeId e : g.out_edges(u)) {
            const auto& edge = g.edge(e);
            const double nd = d + edge_weight(edge);
            if (nd < prof.distance[edge.dst]) {
                prof.distance[edge.dst] = nd;
                heap.emplace(nd, edge.dst);
            }
        }
    }
    prof.likelihood.resize(n);
    std::transform(prof.distance.begin(), prof.distance.end(), prof.likelihood.begin(),
                   likelihood_from_distance);
    prof.total = likelihood_sum(prof.likelihood);
    return prof;
}

double f_corr(const DirectedGraph& g, const SeedSet& s) { return influence_profile(g, s).total; }

// ---------------------------------------------------------------------------

RobustState::RobustState(const DirectedGraph& g) : RobustState(g, SeedSet{}) {}

RobustState::RobustState(const DirectedGraph& g, const SeedSet& s)
    : RobustState(g, influence_profile(g, s)) {}

RobustState::RobustState(const DirectedGraph& g, InfluenceProfile profile)
    : graph_(&g),
      profile_(std::move(profile)),
      scratch_(profile_.likelihood),
      tentative_(g.node_count(), kInfinity) {
    if (profile_.distance.size() != g.node_count() || profile_.likelihood.size() != g.node_count())
        throw DomainError("influence profile does not match the graph");
}

void RobustState::relax_from(NodeId v) {
    const auto& g = *graph_;
    const auto& dist = profile_.distance;
    changed_.clear();
    changed_distance_.clear();
    if (!(dist[v] > 0.0)) return;

    MinHeap heap;
    tentative_[v] = 0.0;
    touched_.push_back(v);
    heap.emplace(0.0, v);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > tentative_[u]) continue;
        for (EdgeId e : g.out_edges(u)) {
            const auto& edge = g.edge(e);
            const double nd = d + edge_weight(edge);
            // Only improvements below 1 can change a likelihood.
            if (nd < 1.0 && nd < dist[edge.dst] && nd < tentative_[edge.dst]) {
                if (tentative_[edge.dst] == kInfinity) touched_.push_back(edge.dst);
                tentative_[edge.dst] = nd;
                heap.emplace(nd, edge.dst);
            }
        }
    }
    for (NodeId u : touched_) {
        changed_.push_back(u);
        changed_distance_.push_back(tentative_[u]);
        tentative_[u] = kInfinity;
    }
    touched_.clear();
}

double RobustState::marginal(NodeId v) {
    if (v >= graph_->node_count()) throw DomainError("node out of range");
    if (profile_.seeds.contains(v)) throw DomainError("node " + std::to_string(v) + " is already a seed");
    relax_from(v);
    if (changed_.empty()) return 0.0;
    for (std::size_t i = 0; i < changed_.size(); ++i)
        scratch_[changed_[i]] = likelihood_from_distance(changed_distance_[i]);
    const double gain = likelihood_sum(scratch_) - profile_.total;
    for (NodeId u : changed_) scratch_[u] = profile_.likelihood[u];
    return gain;
}

void RobustState::add_seed(NodeId v) {
    if (v >= graph_->node_count()) throw DomainError("node out of range");
    profile_.seeds = profile_.seeds.with(v);
    relax_from(v);
    for (std::size_t i = 0; i < changed_.size(); ++i) {
        const NodeId u = changed_[i];
        profile_.distance[u] = changed_distance_[i];
        profile_.likelihood[u] = scratch_[u] = likelihood_from_distance(changed_distance_[i]);
    }
    profile_.total = likelihood_sum(profile_.likelihood);
}

double marginal_gain_corr(const DirectedGraph& g, const InfluenceProfile& base, NodeId v) {
    RobustState state(g, base);
    return state.marginal(v);
}

// ---------------------------------------------------------------------------

std::vector<LpViolation> verify_lp_feasibility(const DirectedGraph& g,
                                               const InfluenceProfile& profile, double tol) {
    std::vector<LpViolation> out;
    const auto& pi = profile.likelihood;
    if (pi.size() != g.node_count()) throw DomainError("influence profile does not match the graph");
    for (NodeId s : profile.seeds) {
        if (std::abs(pi[s] - 1.0) > tol)
            out.push_back({LpViolation::Kind::seed_not_one, s, 0, std::abs(pi[s] - 1.0)});
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        const double excess = pi[edge.src] - pi[edge.dst] - edge_weight(edge);
        if (excess > tol) out.push_back({LpViolation::Kind::edge_gap, edge.src, e, excess});
    }
    for (NodeId v = 0; v < pi.size(); ++v) {
        if (pi[v] < -tol) out.push_back({LpViolation::Kind::out_of_bounds, v, 0, -pi[v]});
        if (pi[v] > 1.0 + tol) out.push_back({LpViolation::Kind::out_of_bounds, v, 0, pi[v] - 1.0});
    }
    return out;
}

// ---------------------------------------------------------------------------

PathSet best_paths(const DirectedGraph& g, const SeedSet& s, NodeId target, std::size_t cap) {
    if (target >= g.node_count()) throw DomainError("node out of range");
    if (s.contains(target)) throw DomainError("best_paths: target is a seed");
    const auto prof = influence_profile(g, s, Pruning::none);
    const auto& dist = prof.distance;

    PathSet out;
    out.target = target;
    out.value = 1.0 - dist[target];
    if (!(dist[target] < 1.0)) return out;

    struct Frame {
        NodeId node;
        std::size_t next;
    };
    std::vector<Frame> stack{{target, 0}};
    std::vector<char> on_path(g.node_count(), 0);
    on_path[target] = 1;
    while (!stack.empty()) {
        auto& top = stack.back();
        if (top.node != target && s.contains(top.node)) {
            if (out.paths.size() == cap) {
                out.truncated = true;
                break;
            }
            auto& path = out.paths.emplace_back();
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) path.push_back(it->node);
            on_path[top.node] = 0;
            stack.pop_back();
            continue;
        }
        const auto in = g.in_edges(top.node);
        bool advanced = false;
        while (top.next < in.size()) {
            const auto& edge = g.edge(in[top.next++]);
            const NodeId k = edge.src;
            if (on_path[k] || dist[k] == kInfinity) continue;
            if (std::abs(dist[k] + edge_weight(edge) - dist[top.node]) <= kTightTolerance) {
                on_path[k] = 1;
                stack.push_back({k, 0});  // invalidates `top`
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            on_path[stack.back().node] = 0;
            stack.pop_back();
        }
    }
    return out;
}

void write_profile_csv(std::ostream& out, const DirectedGraph& g, const InfluenceProfile& profile) {
    const auto old_precision = out.precision(17);
    out << "node_id,d,pi\n";
    for (NodeId v = 0; v < g.node_count(); ++v)
        out << g.original_id(v) << ',' << profile.distance[v] << ',' << profile.likelihood[v] << '\n';
    out.precision(old_precision);
}

}  // namespace corrim
