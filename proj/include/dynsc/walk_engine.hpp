#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dynsc/multigraph.hpp"
#include "dynsc/rng.hpp"

namespace dynsc {

enum class WalkStatus : std::uint8_t {
    ReachedTerminal,
    Truncated,
    CoveredComponent,
};

// terminal flags over the dense vertex ids
class TerminalSet {
public:
    explicit TerminalSet(std::size_t n) : flag_(n, 0) {}
    bool contains(Vertex v) const { return flag_[v] != 0; }
    bool insert(Vertex v) {
        if (flag_[v]) return false;
        flag_[v] = 1;
        ++count_;
        return true;
    }
    std::size_t size() const { return count_; }
    std::vector<Vertex> sorted() const {
        std::vector<Vertex> out;
        out.reserve(count_);
        for (Vertex v = 0; v < flag_.size(); ++v)
            if (flag_[v]) out.push_back(v);
        return out;
    }

private:
    std::vector<std::uint8_t> flag_;
    std::size_t count_ = 0;
};

struct ComponentInfo {
    std::vector<int> comp;              // per vertex
    std::vector<std::size_t> edge_count; // per component
    std::vector<std::size_t> vertex_count;

    static ComponentInfo of(const MultiGraph& g);
};

struct WalkCaps {
    std::uint32_t max_distinct_edges = 0; // ceil(c_dist * beta^-1 * ln n)
    std::uint64_t max_steps = 0;          // ceil(c_bf * c_len * beta^-2 * ln^3 n)
};

WalkCaps unweighted_caps(std::size_t n, double beta, double c_dist = 2.0, double c_len = 4.0,
                         double c_bf = 4.0);

// One half-walk of a sample pair. The generated trajectory is kept in full;
// shortening only moves `len` and the status fields, so trajectory-coupled
// regeneration can be checked exactly.
struct Walk {
    EdgeId origin_edge = kNoEdge;
    std::uint8_t side = 1; // 1 or 2
    WalkStatus status = WalkStatus::Truncated;
    Vertex terminal = 0;          // valid when status == ReachedTerminal
    std::uint32_t len = 0;        // current length in edges (<= gen_len())
    std::vector<Vertex> verts;    // gen_len()+1 entries
    std::vector<std::uint32_t> edges; // gen_len() entries (edge ids)

    std::uint32_t gen_len() const { return static_cast<std::uint32_t>(edges.size()); }
    Vertex start() const { return verts.front(); }
    Vertex end() const { return verts[len]; }
};

// random walk from `start` until it hits T, visits max_distinct_edges
// distinct edges, covers its component, or exceeds max_steps
Walk generate_unweighted_walk(const MultiGraph& g, const TerminalSet& T, Vertex start,
                              const WalkCaps& caps, const ComponentInfo& ci, Rng& rng);

struct HEdge {
    Vertex a = 0, b = 0;
    double w = 0.0;
    bool operator==(const HEdge&) const = default;
};

// change of one sample's contribution to H
struct HDelta {
    std::uint64_t sample = 0;
    std::optional<HEdge> removed;
    std::optional<HEdge> added;
};

struct Posting {
    std::uint32_t walk = 0;
    std::uint32_t pos = 0; // first occurrence position within the walk
};

// The collection W of beta-shorted walks plus reverse indices. Walks come in
// sample pairs (2k, 2k+1); a pair whose halves both reached terminals t1,t2
// with t1 != t2 contributes the H-edge (t1,t2) of weight 1/(rho*ell),
// ell = len1 + len2 + 1.
class WalkStore {
public:
    WalkStore(std::size_t n, std::size_t edge_bound, std::uint32_t rho)
        : rho_(rho), by_vertex_(n), by_edge_(edge_bound) {}

    // bulk load of generated walks (index order = 2*sample + side-1);
    // builds the reverse indices
    void load(std::vector<Walk>&& walks);

    // append one trivial sample pair (both halves length 0 at u and v) for an
    // inserted edge; contributes (u,v,w/rho). No postings are needed.
    std::uint64_t add_trivial_pair(EdgeId origin, Vertex u, Vertex v, double edge_weight);

    // drop a sample pair entirely (its H-edge must already be accounted)
    void retire_sample(std::uint64_t sample);

    std::size_t walk_count() const { return walks_.size(); }
    std::size_t sample_count() const { return walks_.size() / 2; }
    const Walk& walk(std::uint32_t id) const { return walks_[id]; }
    std::uint32_t partner(std::uint32_t id) const { return id ^ 1u; }
    bool sample_alive(std::uint64_t s) const { return alive_[s]; }
    std::uint32_t rho() const { return rho_; }

    // current H contribution of a sample; nullopt when absent or a self-loop
    std::optional<HEdge> sample_edge(std::uint64_t sample) const;

    // walks whose (current) vertex set contains v, with first positions
    std::vector<Posting> walks_through(Vertex v) const;

    // cut every walk at the first occurrence of u; returns H deltas.
    // No-op entries (walks already ending at u) produce no delta.
    std::vector<HDelta> shorten_at(Vertex u);

    // one line per walk: id, status, vertex sequence
    void dump(std::ostream& out) const;

    std::uint64_t generated_steps() const { return generated_steps_; }
    std::uint64_t shortened_steps() const { return shortened_steps_; }

    // exact recomputation of all sample edges against a terminal set under
    // the trajectory coupling (test oracle for shorten_at)
    std::vector<std::optional<HEdge>> coupled_regeneration(const TerminalSet& T) const;

private:
    std::optional<HEdge> pair_edge(const Walk& w1, const Walk& w2, double origin_weight) const;

    std::uint32_t rho_;
    std::vector<Walk> walks_;
    std::vector<char> alive_;   // per sample
    std::vector<double> origin_weight_; // per sample
    std::vector<std::vector<Posting>> by_vertex_;
    std::vector<std::vector<Posting>> by_edge_;
    std::uint64_t generated_steps_ = 0;
    std::uint64_t shortened_steps_ = 0;
};

} // namespace dynsc
