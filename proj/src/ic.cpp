#include "corrim/ic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "corrim/errors.hpp"
#include "corrim/parallel.hpp"

namespace corrim {

namespace {

struct Moments {
    double mean = 0.0;
    double std_error = 0.0;
};

template <class T>
Moments moments(std::span<const T> xs) {
    Moments m;
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return m;
    double sum = 0.0;
    for (auto x : xs) sum += static_cast<double>(x);
    m.mean = sum / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (auto x : xs) ss += (static_cast<double>(x) - m.mean) * (static_cast<double>(x) - m.mean);
        m.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return m;
}

IcEstimate summarize(std::span<const std::uint32_t> counts, std::size_t batches) {
    const auto m = moments(counts);
    IcEstimate est;
    est.mean = m.mean;
    est.std_error = m.std_error;
    est.samples = counts.size();
    if (batches >= 2 && counts.size() >= 2 * batches) {
        std::vector<double> batch_means(batches);
        const std::size_t r = counts.size();
        for (std::size_t b = 0; b < batches; ++b)
            batch_means[b] = moments(counts.subspan(b * r / batches, (b + 1) * r / batches - b * r / batches)).mean;
        est.batches = batches;
        est.batch_std_error = moments(std::span<const double>(batch_means)).std_error;
    }
    return est;
}

inline bool test_bit(const std::vector<std::uint64_t>& bits, std::size_t i) {
    return (bits[i >> 6] >> (i & 63)) & 1u;
}
inline void set_bit(std::vector<std::uint64_t>& bits, std::size_t i) {
    bits[i >> 6] |= std::uint64_t{1} << (i & 63);
}

}  // namespace

std::size_t LiveEdgeSample::live_count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

LiveEdgeSample sample_live_edges(const DirectedGraph& g, RngStream& rng) {
    LiveEdgeSample sample(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (rng.bernoulli(g.edge(e).p)) sample.set(e, true);
    return sample;
}

std::size_t count_influenced(const DirectedGraph& g, const LiveEdgeSample& sample, const SeedSet& s) {
    std::vector<char> reached(g.node_count(), 0);
    std::vector<NodeId> queue(s.begin(), s.end());
    for (NodeId v : s) reached[v] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (EdgeId e : g.out_edges(queue[head])) {
            const NodeId w = g.edge(e).dst;
            if (!reached[w] && sample.live(e)) {
                reached[w] = 1;
                queue.push_back(w);
            }
        }
    }
    return queue.size();
}

IcEstimate f_ic_estimate(const DirectedGraph& g, const SeedSet& s, std::size_t samples,
                         std::uint64_t seed, std::size_t batches) {
    if (samples == 0) throw DomainError("f_ic_estimate: at least one sample is required");
    std::vector<std::uint32_t> counts(samples);
    parallel_for(samples, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            RngStream rng(seed, r);
            counts[r] = static_cast<std::uint32_t>(count_influenced(g, sample_live_edges(g, rng), s));
        }
    });
    return summarize(counts, batches);
}

// ---------------------------------------------------------------------------

namespace {

double f_ic_branching(const DirectedGraph& g, const SeedSet& s) {
    // Every node has at most one parent, so a node is reached iff the chain from its
    // nearest seed ancestor is live. reach[v] < 0 marks "not resolved yet".
    const std::size_t n = g.node_count();
    std::vector<double> reach(n, -1.0);
    std::vector<char> on_chain(n, 0);
    std::vector<NodeId> chain;
    for (NodeId v : s) reach[v] = 1.0;
    for (NodeId start = 0; start < n; ++start) {
        if (reach[start] >= 0.0) continue;
        chain.clear();
        bool unreachable = false;
        for (NodeId u = start;;) {
            if (reach[u] >= 0.0) break;
            if (on_chain[u]) {  // cycle without a seed
                unreachable = true;
                break;
            }
            on_chain[u] = 1;
            chain.push_back(u);
            if (g.in_degree(u) == 0) {
                unreachable = true;
                break;
            }
            u = g.edge(g.in_edges(u)[0]).src;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const NodeId w = *it;
            if (unreachable) {
                reach[w] = 0.0;
            } else {
                const auto& edge = g.edge(g.in_edges(w)[0]);
                reach[w] = edge.p * reach[edge.src];
            }
            on_chain[w] = 0;
        }
    }
    double total = 0.0;
    for (double r : reach) total += r;
    return total;
}

double f_ic_enumerate(const DirectedGraph& g, const SeedSet& s, std::size_t edge_limit) {
    const std::size_t n = g.node_count();
    // Only edges leaving nodes reachable from the seeds can matter.
    std::vector<char> reachable(n, 0);
    std::vector<NodeId> queue(s.begin(), s.end());
    for (NodeId v : s) reachable[v] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (EdgeId e : g.out_edges(queue[head])) {
            const NodeId w = g.edge(e).dst;
            if (!reachable[w]) {
                reachable[w] = 1;
                queue.push_back(w);
            }
        }
    }
    std::vector<EdgeId> relevant;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (reachable[g.edge(e).src]) relevant.push_back(e);
    if (relevant.size() > edge_limit)
        throw BudgetError("f_ic_exact: " + std::to_string(relevant.size()) +
                          " relevant edges exceed the exact-enumeration budget of " +
                          std::to_string(edge_limit));

    const std::size_t m = relevant.size();
    // Local adjacency: per node, (relevant-edge bit, target).
    std::vector<std::vector<std::pair<std::size_t, NodeId>>> out(n);
    for (std::size_t b = 0; b < m; ++b) {
        const auto& edge = g.edge(relevant[b]);
        out[edge.src].emplace_back(b, edge.dst);
    }
    std::vector<char> reached(n, 0);
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        double prob = 1.0;
        for (std::size_t b = 0; b < m; ++b) {
            const double p = g.edge(relevant[b]).p;
            prob *= ((mask >> b) & 1u) ? p : 1.0 - p;
        }
        if (prob == 0.0) continue;
        queue.assign(s.begin(), s.end());
        std::fill(reached.begin(), reached.end(), 0);
        for (NodeId v : s) reached[v] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (const auto& [b, w] : out[queue[head]]) {
                if (!reached[w] && ((mask >> b) & 1u)) {
                    reached[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        total += prob * static_cast<double>(queue.size());
    }
    return total;
}

}  // namespace

double f_ic_exact(const DirectedGraph& g, const SeedSet& s, std::size_t edge_limit) {
    bool branching = true;
    for (NodeId v = 0; v < g.node_count() && branching; ++v) branching = g.in_degree(v) <= 1;
    return branching ? f_ic_branching(g, s) : f_ic_enumerate(g, s, edge_limit);
}

// ---------------------------------------------------------------------------

SampleBank::SampleBank(const DirectedGraph& g, std::size_t samples, std::uint64_t seed)
    : graph_(&g),
      seed_(seed),
      samples_(samples),
      words_per_sample_((g.node_count() + 63) / 64),
      active_(samples * words_per_sample_, 0) {
    if (samples == 0) throw DomainError("SampleBank: at least one sample is required");
    parallel_for(samples, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            RngStream rng(seed, r);
            samples_[r] = sample_live_edges(g, rng);
        }
    });
}

std::uint64_t SampleBank::gain_in_sample(std::size_t r, NodeId v, std::vector<NodeId>& queue,
                                         std::vector<std::uint64_t>& seen) const {
    if (active(r, v)) return 0;
    const auto& g = *graph_;
    const auto& live = samples_[r];
    queue.assign(1, v);
    set_bit(seen, v);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (EdgeId e : g.out_edges(queue[head])) {
            const NodeId w = g.edge(e).dst;
            if (!test_bit(seen, w) && live.live(e) && !active(r, w)) {
                set_bit(seen, w);
                queue.push_back(w);
            }
        }
    }
    for (NodeId w : queue) seen[w >> 6] = 0;
    return queue.size();
}

std::uint64_t SampleBank::gain_count(NodeId v) const {
    if (v >= graph_->node_count()) throw DomainError("node out of range");
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(max_threads(), samples()));
    std::vector<std::uint64_t> partial(chunks, 0);
    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
        std::vector<NodeId> queue;
        std::vector<std::uint64_t> seen(words_per_sample_, 0);
        for (std::size_t c = lo; c < hi; ++c) {
            const std::size_t r_lo = c * samples() / chunks;
            const std::size_t r_hi = (c + 1) * samples() / chunks;
            for (std::size_t r = r_lo; r < r_hi; ++r) partial[c] += gain_in_sample(r, v, queue, seen);
        }
    });
    return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

std::vector<std::uint64_t> SampleBank::all_gain_counts() const {
    const auto& g = *graph_;
    const std::size_t n = g.node_count();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(max_threads(), samples()));
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(n, 0));

    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
        // Tarjan's SCC on the live subgraph of inactive nodes, then a bitset union of
        // reachable sets over the condensation. Tarjan emits components sinks-first.
        constexpr NodeId unvisited = ~NodeId{0};
        std::vector<NodeId> index(n), low(n), comp(n);
        std::vector<char> on_stack(n);
        std::vector<NodeId> stack, members;
        std::vector<std::size_t> comp_begin;
        struct Frame {
            NodeId node;
            std::size_t next;
        };
        std::vector<Frame> call;
        std::vector<std::uint64_t> reach;

        for (std::size_t c = lo; c < hi; ++c) {
            auto& acc = partial[c];
            for (std::size_t r = c * samples() / chunks; r < (c + 1) * samples() / chunks; ++r) {
                const auto& live = samples_[r];
                std::fill(index.begin(), index.end(), unvisited);
                std::fill(on_stack.begin(), on_stack.end(), 0);
                stack.clear();
                members.clear();
                comp_begin.assign(1, 0);
                NodeId counter = 0;
                NodeId comps = 0;

                for (NodeId root = 0; root < n; ++root) {
                    if (index[root] != unvisited || active(r, root)) continue;
                    call.push_back({root, 0});
                    index[root] = low[root] = counter++;
                    stack.push_back(root);
                    on_stack[root] = 1;
                    while (!call.empty()) {
                        auto& f = call.back();
                        const auto out = g.out_edges(f.node);
                        bool pushed = false;
                        while (f.next < out.size()) {
                            const EdgeId e = out[f.next++];
                            const NodeId w = g.edge(e).dst;
                            if (!live.live(e) || active(r, w)) continue;
                            if (index[w] == unvisited) {
                                index[w] = low[w] = counter++;
                                stack.push_back(w);
                                on_stack[w] = 1;
                                call.push_back({w, 0});
                                pushed = true;
                                break;
                            }
                            if (on_stack[w]) low[f.node] = std::min(low[f.node], index[w]);
                        }
                        if (pushed) continue;
                        const NodeId u = f.node;
                        call.pop_back();
                        if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
                        if (low[u] == index[u]) {
                            NodeId w;
                            do {
                                w = stack.back();
                                stack.pop_back();
                                on_stack[w] = 0;
                                comp[w] = comps;
                                members.push_back(w);
                            } while (w != u);
                            comp_begin.push_back(members.size());
                            ++comps;
                        }
                    }
                }

                reach.assign(static_cast<std::size_t>(comps) * words_per_sample_, 0);
                for (NodeId k = 0; k < comps; ++k) {
                    std::uint64_t* rk = reach.data() + static_cast<std::size_t>(k) * words_per_sample_;
                    for (std::size_t i = comp_begin[k]; i < comp_begin[k + 1]; ++i) {
                        const NodeId u = members[i];
                        rk[u >> 6] |= std::uint64_t{1} << (u & 63);
                        for (EdgeId e : g.out_edges(u)) {
                            const NodeId w = g.edge(e).dst;
                            if (!live.live(e) || active(r, w) || comp[w] == k) continue;
                            const std::uint64_t* rw =
                                reach.data() + static_cast<std::size_t>(comp[w]) * words_per_sample_;
                            for (std::size_t x = 0; x < words_per_sample_; ++x) rk[x] |= rw[x];
                        }
                    }
                    std::uint64_t size = 0;
                    for (std::size_t x = 0; x < words_per_sample_; ++x)
                        size += static_cast<std::uint64_t>(std::popcount(rk[x]));
                    for (std::size_t i = comp_begin[k]; i < comp_begin[k + 1]; ++i) acc[members[i]] += size;
                }
            }
        }
    });

    std::vector<std::uint64_t> total(n, 0);
    for (const auto& part : partial)
        for (std::size_t v = 0; v < n; ++v) total[v] += part[v];
    return total;
}

void SampleBank::commit(NodeId v) {
    const auto& g = *graph_;
    if (v >= g.node_count()) throw DomainError("node out of range");
    std::vector<NodeId> queue;
    for (std::size_t r = 0; r < samples(); ++r) {
        if (active(r, v)) continue;
        auto* bits = active_.data() + r * words_per_sample_;
        const auto& live = samples_[r];
        queue.assign(1, v);
        bits[v >> 6] |= std::uint64_t{1} << (v & 63);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (EdgeId e : g.out_edges(queue[head])) {
                const NodeId w = g.edge(e).dst;
                if (live.live(e) && !((bits[w >> 6] >> (w & 63)) & 1u)) {
                    bits[w >> 6] |= std::uint64_t{1} << (w & 63);
                    queue.push_back(w);
                }
            }
        }
        activated_total_ += queue.size();
    }
}

void SampleBank::reset() {
    std::fill(active_.begin(), active_.end(), 0);
    activated_total_ = 0;
}

std::vector<std::uint32_t> SampleBank::counts(const SeedSet& s) const {
    std::vector<std::uint32_t> out(samples());
    parallel_for(samples(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r)
            out[r] = static_cast<std::uint32_t>(count_influenced(*graph_, samples_[r], s));
    });
    return out;
}

IcEstimate SampleBank::estimate(const SeedSet& s) const { return summarize(counts(s), 10); }

void write_estimate_csv(std::ostream& out, const DirectedGraph& g, const SeedSet& s,
                        const IcEstimate& estimate, std::uint64_t seed) {
    const auto old_precision = out.precision(17);
    out << "seed_set,R,mean,stderr,seed,batch_stderr\n";
    bool first = true;
    for (NodeId v : s) {
        out << (first ? "" : ";") << g.original_id(v);
        first = false;
    }
    out << ',' << estimate.samples << ',' << estimate.mean << ',' << estimate.std_error << ','
        << seed << ',' << estimate.batch_std_error << '\n';
    out.precision(old_precision);
}

}  // namespace corrim
