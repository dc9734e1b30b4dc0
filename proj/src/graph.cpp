#include "corrim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>
#include <sstream>

#include "corrim/errors.hpp"
#include "corrim/rng.hpp"

namespace corrim {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) { return (std::uint64_t{a} << 32) | b; }

void build_csr(std::size_t n, std::span<const Edge> edges, bool forward,
               std::vector<std::size_t>& offset, std::vector<EdgeId>& index) {
    offset.assign(n + 1, 0);
    for (const auto& e : edges) ++offset[(forward ? e.src : e.dst) + 1];
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    index.assign(edges.size(), 0);
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (EdgeId id = 0; id < edges.size(); ++id) {
        const auto& e = edges[id];
        index[cursor[forward ? e.src : e.dst]++] = id;
    }
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <class T>
T parse_number(std::string_view token, std::size_t line) {
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("expected a number, got '" + std::string(token) + "'", line);
    return value;
}

// Accumulates raw (src, dst) pairs and applies the ingestion normalization rules.
class EdgeCollector {
public:
    EdgeCollector(const EdgeListOptions& options) : options_(options) {}

    NodeId intern(std::int64_t raw) {
        auto [it, inserted] = dense_.try_emplace(raw, static_cast<NodeId>(original_.size()));
        if (inserted) original_.push_back(raw);
        return it->second;
    }

    void add(std::int64_t raw_src, std::int64_t raw_dst, double p, std::size_t line) {
        NodeId a = intern(raw_src);
        NodeId b = intern(raw_dst);
        if (options_.reverse) std::swap(a, b);
        if (a == b) return;
        if (!seen_.insert(pair_key(a, b)).second) {
            if (options_.dedup == DedupPolicy::reject)
                throw ParseError("duplicate edge " + std::to_string(raw_src) + " " +
                                     std::to_string(raw_dst),
                                 line);
            return;
        }
        edges_.push_back({a, b, p});
    }

    DirectedGraph finish() {
        const std::size_t n = original_.size();
        return DirectedGraph(n, std::move(edges_), std::move(original_));
    }

private:
    EdgeListOptions options_;
    std::unordered_map<std::int64_t, NodeId> dense_;
    std::vector<std::int64_t> original_;
    std::unordered_set<std::uint64_t> seen_;
    std::vector<Edge> edges_;
};

}  // namespace

DirectedGraph::DirectedGraph(std::size_t node_count, std::vector<Edge> edges,
                             std::vector<std::int64_t> original_ids, std::vector<int> labels)
    : node_count_(node_count),
      edges_(std::move(edges)),
      original_ids_(std::move(original_ids)),
      labels_(std::move(labels)) {
    if (node_count_ > std::numeric_limits<NodeId>::max())
        throw DomainError("graph: too many nodes");
    if (edges_.size() > std::numeric_limits<EdgeId>::max())
        throw DomainError("graph: too many edges");
    if (original_ids_.empty()) {
        original_ids_.resize(node_count_);
        std::iota(original_ids_.begin(), original_ids_.end(), std::int64_t{0});
    }
    if (original_ids_.size() != node_count_)
        throw DomainError("graph: original id table size does not match node count");
    if (!labels_.empty() && labels_.size() != node_count_)
        throw DomainError("graph: label table size does not match node count");

    std::unordered_set<std::uint64_t> seen;
    for (const auto& e : edges_) {
        if (e.src >= node_count_ || e.dst >= node_count_)
            throw DomainError("graph: edge endpoint out of range");
        if (e.src == e.dst) throw DomainError("graph: self-loop on node " + std::to_string(e.src));
        if (!(e.p >= 0.0 && e.p <= 1.0))
            throw DomainError("graph: edge probability outside [0, 1]");
        if (!seen.insert(pair_key(e.src, e.dst)).second)
            throw DomainError("graph: parallel edge " + std::to_string(e.src) + "->" +
                              std::to_string(e.dst));
    }
    for (NodeId v = 0; v < node_count_; ++v) {
        if (!by_original_.emplace(original_ids_[v], v).second)
            throw DomainError("graph: duplicate original id " + std::to_string(original_ids_[v]));
    }
    build_csr(node_count_, edges_, true, out_offset_, out_index_);
    build_csr(node_count_, edges_, false, in_offset_, in_index_);
}

std::optional<NodeId> DirectedGraph::find_original(std::int64_t id) const {
    if (auto it = by_original_.find(id); it != by_original_.end()) return it->second;
    return std::nullopt;
}

DirectedGraph DirectedGraph::with_probabilities(std::vector<double> p) const {
    if (p.size() != edges_.size()) throw DomainError("with_probabilities: size mismatch");
    DirectedGraph out = *this;
    for (std::size_t e = 0; e < p.size(); ++e) {
        if (!(p[e] >= 0.0 && p[e] <= 1.0))
            throw DomainError("edge probability outside [0, 1]");
        out.edges_[e].p = p[e];
    }
    return out;
}

// ---------------------------------------------------------------------------

SeedSet::SeedSet(std::vector<NodeId> ids, std::size_t node_count) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
        throw DomainError("seed set contains a duplicate node");
    if (!ids_.empty() && ids_.back() >= node_count)
        throw DomainError("seed node " + std::to_string(ids_.back()) + " is not in the graph");
}

SeedSet SeedSet::from_original(const DirectedGraph& g, std::span<const std::int64_t> ids) {
    std::vector<NodeId> dense;
    dense.reserve(ids.size());
    for (auto id : ids) {
        auto v = g.find_original(id);
        if (!v) throw DomainError("unknown node id " + std::to_string(id));
        dense.push_back(*v);
    }
    return SeedSet(std::move(dense), g.node_count());
}

SeedSet SeedSet::all(std::size_t node_count) {
    std::vector<NodeId> ids(node_count);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    return SeedSet(std::move(ids), node_count);
}

bool SeedSet::contains(NodeId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

SeedSet SeedSet::with(NodeId v) const {
    if (contains(v)) throw DomainError("node " + std::to_string(v) + " is already a seed");
    SeedSet out = *this;
    out.ids_.insert(std::upper_bound(out.ids_.begin(), out.ids_.end(), v), v);
    return out;
}

// ---------------------------------------------------------------------------

DirectedGraph load_edge_list(std::istream& in, const EdgeListOptions& options) {
    EdgeCollector collector(options);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == '%') continue;

        std::string_view tokens[2];
        std::size_t found = 0;
        std::size_t pos = 0;
        while (found < 2 && pos < line.size()) {
            pos = line.find_first_not_of(" \t", pos);
            if (pos == std::string_view::npos) break;
            const auto stop = std::min(line.find_first_of(" \t", pos), line.size());
            tokens[found++] = line.substr(pos, stop - pos);
            pos = stop;
        }
        if (found < 2) throw ParseError("expected 'src dst'", line_no);
        const auto src = parse_number<std::int64_t>(tokens[0], line_no);
        const auto dst = parse_number<std::int64_t>(tokens[1], line_no);
        if (src < 0 || dst < 0) throw ParseError("node ids must be nonnegative", line_no);
        collector.add(src, dst, 0.0, line_no);
    }
    return collector.finish();
}

DirectedGraph load_edge_list_file(const std::string& path, const EdgeListOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    return load_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
    for (const auto& e : g.edges()) out << g.original_id(e.src) << ' ' << g.original_id(e.dst) << '\n';
}

void write_graph_csv(std::ostream& out, const DirectedGraph& g) {
    const auto old_precision = out.precision(17);
    out << "src,dst,p\n";
    for (const auto& e : g.edges())
        out << g.original_id(e.src) << ',' << g.original_id(e.dst) << ',' << e.p << '\n';
    out.precision(old_precision);
}

DirectedGraph load_graph_csv(std::istream& in) {
    EdgeCollector collector(EdgeListOptions{false, DedupPolicy::reject});
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != "src,dst,p") throw ParseError("expected header 'src,dst,p'", line_no);
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) throw ParseError("expected 'src,dst,p'", line_no);
        const auto src = parse_number<std::int64_t>(line.substr(0, c1), line_no);
        const auto dst = parse_number<std::int64_t>(line.substr(c1 + 1, c2 - c1 - 1), line_no);
        const std::string p_text(trim(line.substr(c2 + 1)));
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(p_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != p_text.size())
            throw ParseError("bad probability '" + p_text + "'", line_no);
        if (!(p >= 0.0 && p <= 1.0)) throw ParseError("probability outside [0, 1]", line_no);
        if (src == dst) throw ParseError("self-loop", line_no);
        collector.add(src, dst, p, line_no);
    }
    return collector.finish();
}

// ---------------------------------------------------------------------------

ProbabilityModel ProbabilityModel::identical(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("identical(p): p must lie in [0, 1]");
    return {Kind::identical, p};
}

ProbabilityModel ProbabilityModel::parse(std::string_view text) {
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "identical") {
        if (arg.empty()) throw ParseError("identical:<p> needs a probability", 0);
        double p = 0.0;
        std::size_t used = 0;
        try {
            p = std::stod(std::string(arg), &used);
        } catch (const std::exception&) {
            throw ParseError("bad probability in '" + std::string(text) + "'", 0);
        }
        if (used != arg.size()) throw ParseError("bad probability in '" + std::string(text) + "'", 0);
        return identical(p);
    }
    if (head == "unif01" && arg.empty()) return uniform01();
    if (head == "trivalency" && arg.empty()) return trivalency();
    if (head == "wcascade") {
        if (arg.empty() || arg == "source_total") return weighted_cascade(DegreeConvention::source_total);
        if (arg == "target_in") return weighted_cascade(DegreeConvention::target_in);
    }
    throw ParseError("unknown probability model '" + std::string(text) + "'", 0);
}

std::string ProbabilityModel::to_string() const {
    switch (kind) {
        case Kind::identical: {
            std::ostringstream os;
            os << "identical:" << std::setprecision(17) << p;
            return os.str();
        }
        case Kind::uniform01: return "unif01";
        case Kind::trivalency: return "trivalency";
        case Kind::weighted_cascade:
            return convention == DegreeConvention::source_total ? "wcascade:source_total"
                                                                : "wcascade:target_in";
    }
    return {};
}

DirectedGraph assign_probabilities(const DirectedGraph& g, const ProbabilityModel& model,
                                   std::uint64_t seed) {
    std::vector<double> p(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        switch (model.kind) {
            case ProbabilityModel::Kind::identical:
                if (!(model.p >= 0.0 && model.p <= 1.0))
                    throw DomainError("identical(p): p must lie in [0, 1]");
                p[e] = model.p;
                break;
            case ProbabilityModel::Kind::uniform01: p[e] = RngStream(seed, e).uniform01(); break;
            case ProbabilityModel::Kind::trivalency:
                p[e] = kTrivalencyValues[RngStream(seed, e).below(3)];
                break;
            case ProbabilityModel::Kind::weighted_cascade: {
                const auto deg = model.convention == DegreeConvention::source_total
                                     ? g.degree(edge.src)
                                     : g.in_degree(edge.dst);
                p[e] = 1.0 / static_cast<double>(deg);
                break;
            }
        }
    }
    return g.with_probabilities(std::move(p));
}

// ---------------------------------------------------------------------------

SeedSetStats seed_set_stats(const DirectedGraph& g, const SeedSet& s) {
    if (s.empty()) throw DomainError("seed_set_stats: empty seed set");
    SeedSetStats stats;
    stats.min_degree = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    for (NodeId v : s) {
        const auto d = g.degree(v);
        stats.min_degree = std::min(stats.min_degree, d);
        stats.max_degree = std::max(stats.max_degree, d);
        total += d;
    }
    stats.mean_degree = static_cast<double>(total) / static_cast<double>(s.size());

    // One undirected BFS per seed.
    constexpr auto unseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hops(g.node_count());
    std::size_t diameter = 0;
    for (NodeId source : s) {
        std::fill(hops.begin(), hops.end(), unseen);
        hops[source] = 0;
        std::deque<NodeId> queue{source};
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            auto visit = [&](NodeId w) {
                if (hops[w] == unseen) {
                    hops[w] = hops[u] + 1;
                    queue.push_back(w);
                }
            };
            for (EdgeId e : g.out_edges(u)) visit(g.edge(e).dst);
            for (EdgeId e : g.in_edges(u)) visit(g.edge(e).src);
        }
        for (NodeId t : s) {
            if (hops[t] == unseen) {
                stats.diameter.reset();
                return stats;
            }
            diameter = std::max(diameter, hops[t]);
        }
    }
    stats.diameter = diameter;
    return stats;
}

}  // namespace corrim
