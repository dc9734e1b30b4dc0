#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corrim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    NodeId src;
    NodeId dst;
    double p;  // activation probability in [0, 1]
};

// Immutable directed graph with per-edge activation probabilities.
//
// Node ids are dense (0..node_count-1). The constructor rejects self-loops, parallel
// edges, out-of-range endpoints and probabilities outside [0, 1]. Each node keeps the
// id it had in its source dataset so reports can use the original labels, plus an
// optional integer label (used by generators to tag node types).
class DirectedGraph {
public:
    DirectedGraph() = default;
    DirectedGraph(std::size_t node_count, std::vector<Edge> edges,
                  std::vector<std::int64_t> original_ids = {}, std::vector<int> labels = {});

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_[e]; }

    std::span<const EdgeId> out_edges(NodeId v) const {
        return {out_index_.data() + out_offset_[v], out_index_.data() + out_offset_[v + 1]};
    }
    std::span<const EdgeId> in_edges(NodeId v) const {
        return {in_index_.data() + in_offset_[v], in_index_.data() + in_offset_[v + 1]};
    }

    std::size_t out_degree(NodeId v) const { return out_offset_[v + 1] - out_offset_[v]; }
    std::size_t in_degree(NodeId v) const { return in_offset_[v + 1] - in_offset_[v]; }
    std::size_t degree(NodeId v) const { return out_degree(v) + in_degree(v); }

    std::int64_t original_id(NodeId v) const { return original_ids_[v]; }
    std::span<const std::int64_t> original_ids() const noexcept { return original_ids_; }
    std::optional<NodeId> find_original(std::int64_t id) const;

    // Empty when the graph carries no node labels.
    std::span<const int> labels() const noexcept { return labels_; }

    // Same topology and node ids; probabilities replaced (one per edge, edge order).
    DirectedGraph with_probabilities(std::vector<double> p) const;

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offset_{0};
    std::vector<EdgeId> out_index_;
    std::vector<std::size_t> in_offset_{0};
    std::vector<EdgeId> in_index_;
    std::vector<std::int64_t> original_ids_;
    std::unordered_map<std::int64_t, NodeId> by_original_;
    std::vector<int> labels_;
};

// Sorted set of distinct node ids, each below the owning graph's node count.
class SeedSet {
public:
    SeedSet() = default;
    // Throws DomainError on duplicates or ids >= node_count.
    SeedSet(std::vector<NodeId> ids, std::size_t node_count);

    // Maps dataset ids to dense ids; the error names the first unknown id.
    static SeedSet from_original(const DirectedGraph& g, std::span<const std::int64_t> ids);
    static SeedSet all(std::size_t node_count);

    std::span<const NodeId> ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    bool contains(NodeId v) const;
    SeedSet with(NodeId v) const;

    auto begin() const noexcept { return ids_.begin(); }
    auto end() const noexcept { return ids_.end(); }

    friend bool operator==(const SeedSet&, const SeedSet&) = default;

private:
    std::vector<NodeId> ids_;
};

// ---------------------------------------------------------------------------
// Ingestion

enum class DedupPolicy {
    keep_first,  // collapse repeated (src, dst) pairs to the first occurrence
    reject,      // a repeated pair is a parse error
};

struct EdgeListOptions {
    bool reverse = false;
    DedupPolicy dedup = DedupPolicy::keep_first;
};

// Whitespace-separated "src dst" pairs, '#' or '%' comment lines. Ids are remapped to
// dense ids in first-appearance order; self-loops are dropped. All probabilities are 0.
DirectedGraph load_edge_list(std::istream& in, const EdgeListOptions& options = {});
DirectedGraph load_edge_list_file(const std::string& path, const EdgeListOptions& options = {});
void write_edge_list(std::ostream& out, const DirectedGraph& g);

// "src,dst,p" with a header row; ids are original ids, p printed with 17 significant digits.
void write_graph_csv(std::ostream& out, const DirectedGraph& g);
DirectedGraph load_graph_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Probability models

enum class DegreeConvention {
    source_total,  // p_ij = 1 / (in + out degree of i)
    target_in,     // p_ij = 1 / in-degree of j
};

struct ProbabilityModel {
    enum class Kind { identical, uniform01, trivalency, weighted_cascade };

    Kind kind = Kind::identical;
    double p = 0.0;
    DegreeConvention convention = DegreeConvention::source_total;

    static ProbabilityModel identical(double p);
    static ProbabilityModel uniform01() { return {Kind::uniform01}; }
    static ProbabilityModel trivalency() { return {Kind::trivalency}; }
    static ProbabilityModel weighted_cascade(DegreeConvention c = DegreeConvention::source_total) {
        return {Kind::weighted_cascade, 0.0, c};
    }

    // identical:<p> | unif01 | trivalency | wcascade[:source_total|target_in]
    static ProbabilityModel parse(std::string_view text);
    std::string to_string() const;
};

inline constexpr double kTrivalencyValues[3] = {0.1, 0.01, 0.001};

// Edge e's random draw uses RngStream(seed, e), so results are independent of order.
DirectedGraph assign_probabilities(const DirectedGraph& g, const ProbabilityModel& model,
                                   std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Seed-set statistics

struct SeedSetStats {
    std::size_t min_degree = 0;
    double mean_degree = 0.0;
    std::size_t max_degree = 0;
    std::optional<std::size_t> diameter;  // nullopt: some pair is disconnected
};

// Degrees are in + out. The diameter is the largest undirected hop distance between
// two seeds, measured in the whole graph.
SeedSetStats seed_set_stats(const DirectedGraph& g, const SeedSet& s);

}  // namespace corrim
