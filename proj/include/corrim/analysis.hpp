#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corrim/graph.hpp"
#include "corrim/maximize.hpp"

namespace corrim {

// ---------------------------------------------------------------------------
// Generators

// Chain 0 -> 1 -> ... -> n-1 with every edge probability 1 - 1/n. Requires n >= 2.
DirectedGraph gen_series(std::size_t n);

// Root (id 0) with l disjoint directed paths of m + 2 nodes each. Edges root -> type 1
// and type 1 -> type 2 have p = 0.5; deeper edges have p = 1. Node labels hold the type
// (0 for the root, t for the t-th node of a path). The construction is meant for
// 4m / (m + 3) <= l <= 2m; other (l, m) throw DomainError unless allow_any is set.
DirectedGraph gen_poc_tree(std::size_t l, std::size_t m, bool allow_any = false);

// Smallest admissible branching factor for depth parameter m: ceil(4m / (m + 3)).
std::size_t poc_tree_min_branching(std::size_t m);

// n nodes and m distinct random directed edges (no self-loops), p ~ Unif(0, 1).
DirectedGraph gen_random(std::size_t n, std::size_t m, std::uint64_t seed);

// Preferential attachment with about `edges` directed edges: each arriving node links to
// earlier nodes picked proportionally to degree + 1, each link oriented at random.
// Probabilities are 0. Used as a size-matched stand-in for social-network datasets.
DirectedGraph gen_preferential(std::size_t n, std::size_t edges, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed forms

struct SeriesClosedForm {
    double f_corr;
    double f_ic;
    double kappa;
};

// Values for the series graph with the seed at its head: f_corr = 1 + (n - 1)/2,
// f_ic = 1 + sum_{i=1}^{n-1} (1 - 1/n)^i, kappa = f_corr / f_ic.
SeriesClosedForm series_closed_form(std::size_t n);

// ((l / 2) + 1) / (m + 1)
double poc_tree_closed_form(std::size_t l, std::size_t m);

// ---------------------------------------------------------------------------
// Price of correlations

enum class PocMode { exact, greedy };

struct IcOptions {
    std::size_t samples = 10'000;
    std::uint64_t seed = 0;
    std::size_t exact_edge_limit = 20;
    std::size_t subset_budget = kDefaultSubsetBudget;
};

struct PocReport {
    std::size_t k = 0;
    PocMode mode = PocMode::exact;
    bool surrogate = false;          // seed sets come from greedy, not true optima
    EvaluatorKind ic_kind = EvaluatorKind::ic_exact;
    SeedSet s_corr, s_ic;
    double f_corr_of_corr = 0, f_corr_of_ic = 0;
    double f_ic_of_corr = 0, f_ic_of_ic = 0;
    double poc = 0;                  // f_corr(S_ic) / f_corr(S_corr)
    double kappa = 0;                // f_corr(S_ic) / f_ic(S_ic)
    double misspec_corr = 0;         // f_ic(S_corr) / f_ic(S_ic)
    double misspec_ic = 0;           // f_corr(S_ic) / f_corr(S_corr)
    bool chain_holds = true;         // 0 <= kappa <= POC <= 1 (up to tolerance)
};

// In exact mode both optima come from exhaustive search and f_ic from the exact oracle;
// the kappa <= POC <= 1 chain is then checked (chain_holds). In greedy mode the seed sets
// are lazy-greedy surrogates and f_ic uses the exact oracle when it fits the budget,
// otherwise a sample bank.
PocReport poc_report(const DirectedGraph& g, std::size_t k, PocMode mode, const IcOptions& ic = {});

void write_poc_json(std::ostream& out, const DirectedGraph& g, const PocReport& report);

// ---------------------------------------------------------------------------
// Misspecification table

struct TableRow {
    std::string dataset;
    std::string seed_set_kind;  // "corr" or "ic"
    std::string prob_model;
    double misspec_ratio = 0;
    double ratio_rel_stderr = 0;  // relative Monte Carlo standard error of the ratio
    std::size_t min_deg = 0;
    double avg_deg = 0;
    std::size_t max_deg = 0;
    std::optional<std::size_t> diam;
    std::string ic_estimator;     // e.g. "ic-bank"
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    SeedSet seeds;
};

// Greedy seed sets under both objectives (lazy greedy; f_ic from a sample bank with
// ic.samples samples) and the two misspecification rows: corr row f_ic(S_corr)/f_ic(S_ic),
// ic row f_corr(S_ic)/f_corr(S_corr).
std::vector<TableRow> misspec_table_rows(const DirectedGraph& g, const std::string& dataset,
                                         const std::string& prob_model, std::size_t k,
                                         const IcOptions& ic);

// dataset,seed_set_kind,prob_model,misspec_ratio,min_deg,avg_deg,max_deg,diam followed by
// estimator metadata columns.
void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows);

}  // namespace corrim
