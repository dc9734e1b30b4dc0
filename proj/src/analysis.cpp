#include "corrim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "corrim/errors.hpp"
#include "corrim/ic.hpp"
#include "corrim/rng.hpp"
#include "corrim/robust.hpp"

namespace corrim {

DirectedGraph gen_series(std::size_t n) {
    if (n < 2) throw DomainError("gen_series: n must be at least 2");
    const double p = 1.0 - 1.0 / static_cast<double>(n);
    std::vector<Edge> edges;
    for (NodeId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, p});
    return DirectedGraph(n, std::move(edges));
}

std::size_t poc_tree_min_branching(std::size_t m) { return (4 * m + m + 2) / (m + 3); }

DirectedGraph gen_poc_tree(std::size_t l, std::size_t m, bool allow_any) {
    if (l == 0) throw DomainError("gen_poc_tree: l must be positive");
    if (!allow_any && (4 * m > l * (m + 3) || l > 2 * m))
        throw DomainError("gen_poc_tree: need 4m/(m+3) <= l <= 2m, got l=" + std::to_string(l) +
                          " m=" + std::to_string(m));
    const std::size_t depth = m + 2;
    const std::size_t n = l * depth + 1;
    std::vector<Edge> edges;
    std::vector<int> labels(n, 0);
    for (std::size_t b = 0; b < l; ++b) {
        const auto first = static_cast<NodeId>(1 + b * depth);
        for (std::size_t t = 1; t <= depth; ++t) labels[first + t - 1] = static_cast<int>(t);
        edges.push_back({0, first, 0.5});
        edges.push_back({first, first + 1, 0.5});
        for (std::size_t t = 2; t < depth; ++t)
            edges.push_back({static_cast<NodeId>(first + t - 1), static_cast<NodeId>(first + t), 1.0});
    }
    return DirectedGraph(n, std::move(edges), {}, std::move(labels));
}

DirectedGraph gen_random(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n < 2 && m > 0) throw DomainError("gen_random: need at least two nodes for an edge");
    const std::size_t max_edges = n * (n - 1);
    if (m > max_edges) throw DomainError("gen_random: too many edges requested");
    RngStream rng(seed, 0);
    std::vector<Edge> edges;
    if (2 * m > max_edges) {
        std::vector<Edge> all;
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = 0; b < n; ++b)
                if (a != b) all.push_back({a, b, 0.0});
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + rng.below(all.size() - i);
            std::swap(all[i], all[j]);
        }
        edges.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
        std::unordered_set<std::uint64_t> seen;
        while (edges.size() < m) {
            const auto a = static_cast<NodeId>(rng.below(n));
            const auto b = static_cast<NodeId>(rng.below(n));
            if (a == b || !seen.insert((std::uint64_t{a} << 32) | b).second) continue;
            edges.push_back({a, b, 0.0});
        }
    }
    return assign_probabilities(DirectedGraph(n, std::move(edges)), ProbabilityModel::uniform01(), seed);
}

DirectedGraph gen_preferential(std::size_t n, std::size_t edges, std::uint64_t seed) {
    if (n == 0) return DirectedGraph{};
    RngStream rng(seed, 0);
    std::vector<Edge> out;
    out.reserve(edges);
    std::vector<NodeId> ballot{0};
    std::vector<NodeId> chosen;
    for (NodeId v = 1; v < n; ++v) {
        const std::size_t target_total = static_cast<std::size_t>(
            static_cast<unsigned long long>(v) * edges / (n - 1));
        const std::size_t quota = std::min<std::size_t>(target_total - std::min(target_total, out.size()), v);
        chosen.clear();
        for (std::size_t tries = 0; chosen.size() < quota && tries < 50 * quota; ++tries) {
            const NodeId t = ballot[rng.below(ballot.size())];
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
        }
        for (NodeId t : chosen) {
            if (rng.bernoulli(0.5)) out.push_back({v, t, 0.0});
            else out.push_back({t, v, 0.0});
            ballot.push_back(t);
            ballot.push_back(v);
        }
        ballot.push_back(v);
    }
    return DirectedGraph(n, std::move(out));
}

// ---------------------------------------------------------------------------

SeriesClosedForm series_closed_form(std::size_t n) {
    if (n < 2) throw DomainError("series_closed_form: n must be at least 2");
    const double nd = static_cast<double>(n);
    const double r = 1.0 - 1.0 / nd;
    double f_ic = 1.0;
    double term = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        term *= r;
        f_ic += term;
    }
    const double f_corr = 1.0 + (nd - 1.0) / 2.0;
    return {f_corr, f_ic, f_corr / f_ic};
}

double poc_tree_closed_form(std::size_t l, std::size_t m) {
    return (static_cast<double>(l) / 2.0 + 1.0) / static_cast<double>(m + 1);
}

// ---------------------------------------------------------------------------

namespace {

bool ic_exact_feasible(const DirectedGraph& g, std::size_t edge_limit) {
    if (g.edge_count() <= edge_limit) return true;
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (g.in_degree(v) > 1) return false;
    return true;
}

}  // namespace

PocReport poc_report(const DirectedGraph& g, std::size_t k, PocMode mode, const IcOptions& ic) {
    if (k < 1 || k > g.node_count()) throw DomainError("poc_report: k out of range");
    PocReport r;
    r.k = k;
    r.mode = mode;
    auto corr = make_corr_evaluator(g);
    std::unique_ptr<InfluenceEvaluator> icv;
    if (mode == PocMode::exact) {
        icv = make_ic_exact_evaluator(g, ic.exact_edge_limit);
        r.s_corr = exhaustive_opt(*corr, k, ic.subset_budget).seeds;
        r.s_ic = exhaustive_opt(*icv, k, ic.subset_budget).seeds;
    } else {
        r.surrogate = true;
        if (ic_exact_feasible(g, ic.exact_edge_limit))
            icv = make_ic_exact_evaluator(g, ic.exact_edge_limit);
        else
            icv = make_ic_bank_evaluator(g, ic.samples, ic.seed);
        r.s_corr = lazy_greedy(*corr, k).seeds(g.node_count());
        r.s_ic = lazy_greedy(*icv, k).seeds(g.node_count());
    }
    r.ic_kind = icv->kind();
    r.f_corr_of_corr = corr->value(r.s_corr);
    r.f_corr_of_ic = corr->value(r.s_ic);
    r.f_ic_of_corr = icv->value(r.s_corr);
    r.f_ic_of_ic = icv->value(r.s_ic);
    r.poc = r.f_corr_of_ic / r.f_corr_of_corr;
    r.kappa = r.f_corr_of_ic / r.f_ic_of_ic;
    r.misspec_corr = r.f_ic_of_corr / r.f_ic_of_ic;
    r.misspec_ic = r.poc;
    constexpr double tol = 1e-9;
    r.chain_holds = r.kappa >= 0.0 && r.kappa <= r.poc + tol && r.poc <= 1.0 + tol;
    return r;
}

void write_poc_json(std::ostream& out, const DirectedGraph& g, const PocReport& r) {
    auto ids = [&](const SeedSet& s) {
        nlohmann::json a = nlohmann::json::array();
        for (NodeId v : s) a.push_back(g.original_id(v));
        return a;
    };
    nlohmann::json j = {
        {"k", r.k},
        {"mode", r.mode == PocMode::exact ? "exact" : "greedy"},
        {"surrogate", r.surrogate},
        {"ic_evaluator", to_string(r.ic_kind)},
        {"S_corr", ids(r.s_corr)},
        {"S_ic", ids(r.s_ic)},
        {"f_corr_S_corr", r.f_corr_of_corr},
        {"f_corr_S_ic", r.f_corr_of_ic},
        {"f_ic_S_corr", r.f_ic_of_corr},
        {"f_ic_S_ic", r.f_ic_of_ic},
        {"poc", r.poc},
        {"kappa_S_ic", r.kappa},
        {"misspec_corr", r.misspec_corr},
        {"misspec_ic", r.misspec_ic},
        {"chain_kappa_le_poc_le_1", r.chain_holds},
    };
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

std::vector<TableRow> misspec_table_rows(const DirectedGraph& g, const std::string& dataset,
                                         const std::string& prob_model, std::size_t k,
                                         const IcOptions& ic) {
    auto corr = make_corr_evaluator(g);
    auto icv = make_ic_bank_evaluator(g, ic.samples, ic.seed);
    const SeedSet s_corr = lazy_greedy(*corr, k).seeds(g.node_count());
    const SeedSet s_ic = lazy_greedy(*icv, k).seeds(g.node_count());

    // Ratio standard error from paired per-sample counts on the selection bank.
    const SampleBank bank(g, ic.samples, ic.seed);
    const auto a = bank.counts(s_corr);
    const auto b = bank.counts(s_ic);
    const double rr = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / rr;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / rr;
    const double ratio_ic = mean_a / mean_b;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - ratio_ic * static_cast<double>(b[i]);
        ss += d * d;
    }
    const double ratio_se = a.size() > 1 ? std::sqrt(ss / (rr - 1.0) / rr) / mean_b : 0.0;

    auto row = [&](const char* kind, const SeedSet& s, double ratio, double rel_se) {
        TableRow t;
        t.dataset = dataset;
        t.seed_set_kind = kind;
        t.prob_model = prob_model;
        t.misspec_ratio = ratio;
        t.ratio_rel_stderr = rel_se;
        const auto stats = seed_set_stats(g, s);
        t.min_deg = stats.min_degree;
        t.avg_deg = stats.mean_degree;
        t.max_deg = stats.max_degree;
        t.diam = stats.diameter;
        t.ic_estimator = to_string(EvaluatorKind::ic_bank);
        t.samples = ic.samples;
        t.seed = ic.seed;
        t.seeds = s;
        return t;
    };
    return {row("corr", s_corr, ratio_ic, ratio_se / ratio_ic),
            row("ic", s_ic, f_corr(g, s_ic) / f_corr(g, s_corr), 0.0)};
}

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
    const auto old_precision = out.precision(17);
    out << "dataset,seed_set_kind,prob_model,misspec_ratio,min_deg,avg_deg,max_deg,diam,"
           "ic_estimator,samples,seed,ratio_rel_stderr\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.seed_set_kind << ',' << r.prob_model << ',' << r.misspec_ratio << ','
            << r.min_deg << ',' << r.avg_deg << ',' << r.max_deg << ',';
        if (r.diam) out << *r.diam;
        else out << "disconnected";
        out << ',' << r.ic_estimator << ',' << r.samples << ',' << r.seed << ',' << r.ratio_rel_stderr << '\n';
    }
    out.precision(old_precision);
}

}  // namespace corrim
