#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "corrim/graph.hpp"
#include "corrim/rng.hpp"

namespace corrim {

// One realization of edge states, aligned with the graph's edge index.
class LiveEdgeSample {
public:
    LiveEdgeSample() = default;
    explicit LiveEdgeSample(std::size_t edge_count, bool value = false)
        : size_(edge_count), words_((edge_count + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::size_t size() const noexcept { return size_; }
    bool live(EdgeId e) const { return (words_[e >> 6] >> (e & 63)) & 1u; }
    void set(EdgeId e, bool value) {
        const auto bit = std::uint64_t{1} << (e & 63);
        words_[e >> 6] = value ? (words_[e >> 6] | bit) : (words_[e >> 6] & ~bit);
    }
    std::size_t live_count() const;

    friend bool operator==(const LiveEdgeSample&, const LiveEdgeSample&) = default;

private:
    void trim() {
        if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

// Each edge is live independently with probability p_e, drawn from rng in edge order.
LiveEdgeSample sample_live_edges(const DirectedGraph& g, RngStream& rng);

// Seeds plus every node reachable from them along live edges.
std::size_t count_influenced(const DirectedGraph& g, const LiveEdgeSample& sample, const SeedSet& s);

struct IcEstimate {
    double mean = 0.0;
    double std_error = 0.0;      // unbiased sample stdev / sqrt(R)
    std::size_t samples = 0;
    std::size_t batches = 0;     // equal-size batches used for batch_std_error (0: not computed)
    double batch_std_error = 0.0;  // stdev of batch means / sqrt(batches)
};

inline constexpr std::size_t kDefaultSamples = 10'000;

// Sample r uses RngStream(seed, r). Throws DomainError when samples == 0.
IcEstimate f_ic_estimate(const DirectedGraph& g, const SeedSet& s, std::size_t samples,
                         std::uint64_t seed, std::size_t batches = 10);

inline constexpr std::size_t kExactEdgeLimit = 20;

// Exact expected influence under independent activations.
//
// Graphs where every node has in-degree <= 1 are evaluated in closed form (a node is
// reached iff the chain from its nearest seed ancestor is live). Otherwise all 2^m
// states of the m edges whose source is reachable from the seeds are enumerated; more
// than edge_limit such edges throws BudgetError.
double f_ic_exact(const DirectedGraph& g, const SeedSet& s, std::size_t edge_limit = kExactEdgeLimit);

// A fixed bank of live-edge samples with per-sample activation state, for greedy
// maximization under independent activations. Gains are exact integer counts over
// the bank, so the same bank always yields the same selections.
class SampleBank {
public:
    SampleBank(const DirectedGraph& g, std::size_t samples, std::uint64_t seed);

    std::size_t samples() const noexcept { return samples_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const LiveEdgeSample& sample(std::size_t r) const { return samples_[r]; }

    // Sum over samples of nodes newly reached from v (0 in samples where v is active).
    std::uint64_t gain_count(NodeId v) const;
    double marginal_gain(NodeId v) const {
        return static_cast<double>(gain_count(v)) / static_cast<double>(samples());
    }
    // gain_count for every node at once (one condensation pass per sample).
    std::vector<std::uint64_t> all_gain_counts() const;

    // Activates v and everything it reaches in each sample. Committing a node twice is
    // allowed and has no effect.
    void commit(NodeId v);
    void reset();

    // Total activated nodes over all samples; value() is its mean.
    std::uint64_t activated_count() const noexcept { return activated_total_; }
    double value() const {
        return static_cast<double>(activated_total_) / static_cast<double>(samples());
    }
    bool active(std::size_t r, NodeId v) const {
        return (active_[r * words_per_sample_ + (v >> 6)] >> (v & 63)) & 1u;
    }

    // count_influenced of s in every sample, ignoring the activation state.
    std::vector<std::uint32_t> counts(const SeedSet& s) const;
    IcEstimate estimate(const SeedSet& s) const;

private:
    std::uint64_t gain_in_sample(std::size_t r, NodeId v, std::vector<NodeId>& queue,
                                 std::vector<std::uint64_t>& seen) const;

    const DirectedGraph* graph_;
    std::uint64_t seed_;
    std::vector<LiveEdgeSample> samples_;
    std::size_t words_per_sample_;
    std::vector<std::uint64_t> active_;
    std::uint64_t activated_total_ = 0;
};

// seed_set,R,mean,stderr,seed,batch_stderr with original ids joined by ';'.
void write_estimate_csv(std::ostream& out, const DirectedGraph& g, const SeedSet& s,
                        const IcEstimate& estimate, std::uint64_t seed);

}  // namespace corrim
