#include "corrim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrim/adversary.hpp"
#include "corrim/analysis.hpp"
#include "corrim/errors.hpp"
#include "corrim/graph.hpp"
#include "corrim/ic.hpp"
#include "corrim/maximize.hpp"
#include "corrim/parallel.hpp"
#include "corrim/robust.hpp"

namespace corrim::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string subcommand;
    std::string graph_path;
    std::string generator;
    bool reverse_edges = false;
    std::string prob_model;
    std::string seeds;
    std::size_t k = 1;
    std::string evaluator = "corr";
    std::size_t samples = kDefaultSamples;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::size_t budget = kDefaultSubsetBudget;
    std::size_t edge_limit = kExactEdgeLimit;
    unsigned threads = 0;
    std::string mode = "exact";
    std::optional<double> q;
    std::string dataset_name;
    std::vector<std::string> models;
    bool no_timing = false;

    json to_json() const {
        json j = {{"subcommand", subcommand},   {"graph", graph_path},     {"gen", generator},
                  {"reverse_edges", reverse_edges}, {"prob_model", prob_model}, {"seeds", seeds},
                  {"k", k},                     {"evaluator", evaluator},  {"samples", samples},
                  {"seed", seed},               {"budget", budget},        {"edge_limit", edge_limit},
                  {"mode", mode},               {"dataset", dataset_name}, {"models", models}};
        if (q) j["q"] = *q;
        return j;
    }
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ParseError("bad " + what + " '" + text + "'", 0);
}

DirectedGraph generate(const RunConfig& cfg) {
    const auto parts = split(cfg.generator, ':');
    if (parts.empty()) throw ParseError("empty generator spec", 0);
    const auto& kind = parts[0];
    auto arg = [&](std::size_t i) {
        if (i >= parts.size()) throw ParseError("generator '" + cfg.generator + "' is missing arguments", 0);
        return parse_size(parts[i], "generator argument");
    };
    if (kind == "series") return gen_series(arg(1));
    if (kind == "poc") return gen_poc_tree(arg(1), arg(2));
    if (kind == "random") return gen_random(arg(1), arg(2), cfg.seed);
    if (kind == "pa") return gen_preferential(arg(1), arg(2), cfg.seed);
    throw ParseError("unknown generator '" + kind + "' (series:N, poc:L:M, random:N:M, pa:N:E)", 0);
}

DirectedGraph load_graph(const RunConfig& cfg) {
    if (!cfg.generator.empty() && !cfg.graph_path.empty())
        throw ParseError("use either --graph or --gen, not both", 0);
    DirectedGraph g;
    bool has_probabilities = true;
    if (!cfg.generator.empty()) {
        g = generate(cfg);
        has_probabilities = cfg.generator.rfind("pa", 0) != 0;
    } else if (!cfg.graph_path.empty()) {
        if (fs::path(cfg.graph_path).extension() == ".csv") {
            std::ifstream in(cfg.graph_path);
            if (!in) throw ParseError("cannot open " + cfg.graph_path, 0);
            g = load_graph_csv(in);
            if (cfg.reverse_edges) throw ParseError("--reverse-edges applies to edge-list input only", 0);
        } else {
            g = load_edge_list_file(cfg.graph_path, {cfg.reverse_edges, DedupPolicy::keep_first});
            has_probabilities = false;
        }
    } else {
        throw ParseError("a graph is required (--graph PATH or --gen SPEC)", 0);
    }
    if (!cfg.prob_model.empty()) return assign_probabilities(g, ProbabilityModel::parse(cfg.prob_model), cfg.seed);
    if (!has_probabilities) throw ParseError("this graph has no edge probabilities; pass --prob-model", 0);
    return g;
}

SeedSet parse_seeds(const DirectedGraph& g, const std::string& text) {
    if (text == "all") return SeedSet::all(g.node_count());
    std::vector<std::int64_t> ids;
    for (const auto& token : split(text, ',')) {
        try {
            std::size_t used = 0;
            const auto v = std::stoll(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ids.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("bad node id '" + token + "' in --seeds", 0);
        }
    }
    return SeedSet::from_original(g, ids);
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    std::ofstream f(fs::path(cfg.out_dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(cfg.out_dir) / name).string());
    return f;
}

void write_sidecar(const RunConfig& cfg, const json& results) {
    auto f = open_out(cfg, cfg.subcommand + ".json");
    json j = {{"config", cfg.to_json()}, {"results", results}};
    f << j.dump(2) << '\n';
}

std::string seed_list(const DirectedGraph& g, const SeedSet& s) {
    std::string text;
    for (NodeId v : s) text += (text.empty() ? "" : ",") + std::to_string(g.original_id(v));
    return text;
}

std::unique_ptr<InfluenceEvaluator> make_evaluator(const std::string& name, const DirectedGraph& g,
                                                   const RunConfig& cfg) {
    if (name == "corr") return make_corr_evaluator(g);
    if (name == "ic-bank") return make_ic_bank_evaluator(g, cfg.samples, cfg.seed);
    if (name == "ic-exact") return make_ic_exact_evaluator(g, cfg.edge_limit);
    throw ParseError("unknown evaluator '" + name + "' (corr, ic-bank, ic-exact)", 0);
}

// ---------------------------------------------------------------------------

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const auto g = load_graph(cfg);
    const auto s = parse_seeds(g, cfg.seeds);
    const auto prof = influence_profile(g, s);
    {
        auto f = open_out(cfg, "profile.csv");
        write_profile_csv(f, g, prof);
    }
    json results = {{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"seed_set", seed_list(g, s)},
                    {"f_corr", prof.total}};
    if (cfg.samples > 0) {
        const auto est = f_ic_estimate(g, s, cfg.samples, cfg.seed);
        auto f = open_out(cfg, "estimate.csv");
        write_estimate_csv(f, g, s, est, cfg.seed);
        results["f_ic_estimate"] = {{"mean", est.mean},
                                    {"stderr", est.std_error},
                                    {"samples", est.samples},
                                    {"batches", est.batches},
                                    {"batch_stderr", est.batch_std_error}};
    }
    write_sidecar(cfg, results);
    out << std::setprecision(17) << "f_corr " << prof.total << '\n';
    if (results.contains("f_ic_estimate"))
        out << "f_ic " << results["f_ic_estimate"]["mean"].get<double>() << " +- "
            << results["f_ic_estimate"]["stderr"].get<double>() << '\n';
}

void cmd_maximize(const RunConfig& cfg, std::ostream& out) {
    const auto g = load_graph(cfg);
    const auto names = cfg.evaluator == "both" ? std::vector<std::string>{"corr", "ic-bank"}
                                               : std::vector<std::string>{cfg.evaluator};
    auto timing = open_out(cfg, "timing.csv");
    timing << std::setprecision(17) << "k,evaluator,elapsed_ms\n";
    json results = json::object();
    for (const auto& name : names) {
        auto e = make_evaluator(name, g, cfg);
        const auto trace = lazy_greedy(*e, cfg.k);
        {
            auto f = open_out(cfg, "trace_" + name + ".csv");
            write_trace_csv(f, g, trace, !cfg.no_timing);
        }
        for (std::size_t i = 0; i < trace.steps.size(); ++i)
            timing << i + 1 << ',' << name << ',' << (cfg.no_timing ? 0.0 : trace.steps[i].elapsed_ms) << '\n';
        results[name] = {{"seed_set", seed_list(g, trace.seeds(g.node_count()))},
                         {"value", trace.value},
                         {"evaluations", trace.evaluations}};
        out << std::setprecision(17) << name << " value " << trace.value << " evaluations "
            << trace.evaluations << " seeds " << seed_list(g, trace.seeds(g.node_count())) << '\n';
    }
    write_sidecar(cfg, results);
}

void cmd_coupling(const RunConfig& cfg, std::ostream& out) {
    const auto g = load_graph(cfg);
    const auto s = parse_seeds(g, cfg.seeds);
    const auto prof = influence_profile(g, s);
    const auto cells = cell_report(g, prof);
    {
        auto f = open_out(cfg, "cells.csv");
        write_cells_csv(f, cells);
    }
    {
        auto f = open_out(cfg, "marginals.csv");
        write_marginals_csv(f, g, prof);
    }
    std::size_t discrepancies = 0;
    for (const auto& edge : g.edges()) discrepancies += edge_marginal(prof, edge) != edge.p;
    const auto reach = check_reachability_identity(g, prof);
    const double expected = exact_expected_influence(g, prof);
    json results = {{"seed_set", seed_list(g, s)},
                    {"cells", cells.size()},
                    {"exact_expected_influence", expected},
                    {"f_corr", prof.total},
                    {"marginal_discrepancies", discrepancies},
                    {"reachability_identity_holds", reach.holds}};
    if (cfg.q) {
        const auto draw = draw_coupling(g, prof, *cfg.q);
        auto f = open_out(cfg, "draw.csv");
        write_coupling_csv(f, g, draw);
        results["draw_active"] = draw.active.size();
    }
    write_sidecar(cfg, results);
    out << std::setprecision(17) << "cells " << cells.size() << "\nexpected_influence " << expected
        << "\nf_corr " << prof.total << "\nmarginal_discrepancies " << discrepancies
        << "\nreachability_identity " << (reach.holds ? "holds" : "FAILS") << '\n';
}

void cmd_poc(const RunConfig& cfg, std::ostream& out) {
    const auto g = load_graph(cfg);
    PocMode mode;
    if (cfg.mode == "exact") mode = PocMode::exact;
    else if (cfg.mode == "greedy") mode = PocMode::greedy;
    else throw ParseError("--mode must be exact or greedy", 0);
    IcOptions ic{cfg.samples, cfg.seed, cfg.edge_limit, cfg.budget};
    const auto report = poc_report(g, cfg.k, mode, ic);
    {
        auto f = open_out(cfg, "poc_report.json");
        write_poc_json(f, g, report);
    }
    write_sidecar(cfg, {{"poc", report.poc}, {"kappa_S_ic", report.kappa}, {"chain_holds", report.chain_holds}});
    out << std::setprecision(17) << "poc " << report.poc << "\nkappa " << report.kappa << "\nS_corr "
        << seed_list(g, report.s_corr) << "\nS_ic " << seed_list(g, report.s_ic) << "\nchain "
        << (report.chain_holds ? "holds" : "VIOLATED") << '\n';
}

void cmd_table2(const RunConfig& cfg, std::ostream& out) {
    RunConfig base = cfg;
    base.prob_model.clear();
    // Topology only; each model assigns its own probabilities.
    DirectedGraph topology;
    if (!cfg.generator.empty()) {
        topology = generate(cfg);
    } else if (!cfg.graph_path.empty()) {
        topology = load_edge_list_file(cfg.graph_path, {cfg.reverse_edges, DedupPolicy::keep_first});
    } else {
        throw ParseError("a graph is required (--graph PATH or --gen SPEC)", 0);
    }
    const auto models = cfg.models.empty() ? std::vector<std::string>{"unif01", "trivalency", "wcascade"}
                                           : cfg.models;
    std::string dataset = cfg.dataset_name;
    if (dataset.empty())
        dataset = cfg.generator.empty() ? fs::path(cfg.graph_path).stem().string() : cfg.generator;

    std::vector<TableRow> rows;
    IcOptions ic{cfg.samples, cfg.seed, cfg.edge_limit, cfg.budget};
    for (const auto& m : models) {
        const auto model = ProbabilityModel::parse(m);
        const auto g = assign_probabilities(topology, model, cfg.seed);
        auto pair = misspec_table_rows(g, dataset, model.to_string(), cfg.k, ic);
        for (auto& r : pair) {
            out << std::setprecision(6) << r.dataset << ' ' << r.seed_set_kind << ' ' << r.prob_model
                << " ratio " << r.misspec_ratio << '\n';
            rows.push_back(std::move(r));
        }
    }
    {
        auto f = open_out(cfg, "table2.csv");
        write_table_csv(f, rows);
    }
    json results = json::array();
    for (const auto& r : rows) {
        json seeds = json::array();
        results.push_back({{"seed_set_kind", r.seed_set_kind},
                           {"prob_model", r.prob_model},
                           {"misspec_ratio", r.misspec_ratio},
                           {"ratio_rel_stderr", r.ratio_rel_stderr}});
    }
    write_sidecar(cfg, results);
}

void cmd_gen(const RunConfig& cfg, std::ostream& out) {
    if (cfg.generator.empty()) throw ParseError("gen requires --gen SPEC", 0);
    const auto g = load_graph(cfg);
    {
        auto f = open_out(cfg, "graph.csv");
        write_graph_csv(f, g);
    }
    write_sidecar(cfg, {{"nodes", g.node_count()}, {"edges", g.edge_count()}});
    out << "nodes " << g.node_count() << "\nedges " << g.edge_count() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlation-robust influence maximization"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_graph = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "Edge list (src dst per line) or src,dst,p CSV");
        sub->add_option("--gen", cfg.generator, "Generator: series:N | poc:L:M | random:N:M | pa:N:E");
        sub->add_flag("--reverse-edges", cfg.reverse_edges, "Store every edge (i,j) as (j,i)");
        sub->add_option("--prob-model", cfg.prob_model,
                        "identical:<p> | unif01 | trivalency | wcascade[:source_total|target_in]");
        sub->add_option("--seed", cfg.seed, "Master seed for every random draw");
        sub->add_option("--out", cfg.out_dir, "Output directory");
        sub->add_option("--threads", cfg.threads, "Worker thread cap (0: all cores)");
        sub->add_option("--budget", cfg.budget, "Maximum number of subsets enumerated by exact search");
    };

    auto* eval = app.add_subcommand("eval", "Robust influence profile and IC estimate of a seed set");
    add_graph(eval);
    eval->add_option("--seeds", cfg.seeds, "Comma-separated original node ids, or 'all'")->required();
    eval->add_option("--samples", cfg.samples, "Monte Carlo samples (0 skips the IC estimate)");

    auto* maximize = app.add_subcommand("maximize", "Lazy greedy seed selection");
    add_graph(maximize);
    maximize->add_option("--k", cfg.k, "Seed budget")->required();
    maximize->add_option("--evaluator", cfg.evaluator, "corr | ic-bank | ic-exact | both");
    maximize->add_option("--samples", cfg.samples, "Samples in the IC bank");
    maximize->add_option("--edge-limit", cfg.edge_limit, "Exact IC enumeration budget (edges)");
    maximize->add_flag("--no-timing", cfg.no_timing, "Write 0 for elapsed times (byte-stable output)");

    auto* coupling = app.add_subcommand("coupling", "Adversarial coupling cells and edge marginals");
    add_graph(coupling);
    coupling->add_option("--seeds", cfg.seeds, "Comma-separated original node ids")->required();
    coupling->add_option("--q", cfg.q, "Also write the single draw at this q")->check(CLI::Range(0.0, 1.0));

    auto* poc = app.add_subcommand("poc", "Price of correlations and correlation gap");
    add_graph(poc);
    poc->add_option("--k", cfg.k, "Seed budget")->required();
    poc->add_option("--mode", cfg.mode, "exact | greedy");
    poc->add_option("--samples", cfg.samples, "Samples when IC needs Monte Carlo");
    poc->add_option("--edge-limit", cfg.edge_limit, "Exact IC enumeration budget (edges)");

    auto* table2 = app.add_subcommand("table2", "Misspecification ratios and seed-set statistics");
    add_graph(table2);
    table2->add_option("--k", cfg.k, "Seed budget")->required();
    table2->add_option("--samples", cfg.samples, "Samples in the IC bank");
    table2->add_option("--models", cfg.models, "Probability models (default unif01 trivalency wcascade)");
    table2->add_option("--dataset-name", cfg.dataset_name, "Dataset label for the rows");

    auto* gen = app.add_subcommand("gen", "Write a synthetic instance as src,dst,p CSV");
    add_graph(gen);

    std::vector<const char*> argv{"corrim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    set_max_threads(cfg.threads);
    try {
        if (cfg.subcommand == "eval") cmd_eval(cfg, out);
        else if (cfg.subcommand == "maximize") cmd_maximize(cfg, out);
        else if (cfg.subcommand == "coupling") cmd_coupling(cfg, out);
        else if (cfg.subcommand == "poc") cmd_poc(cfg, out);
        else if (cfg.subcommand == "table2") cmd_table2(cfg, out);
        else if (cfg.subcommand == "gen") cmd_gen(cfg, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const BudgetError& e) {
        err << "refused: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace corrim::cli
