#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "dynsc/rng.hpp"

namespace dynsc {

using Vertex = std::uint32_t;
using EdgeId = std::uint64_t;

inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

enum class WeightMode : std::uint8_t {
    Unweighted, // all weights 1
    Weighted,   // weights in [1, n^c]
    Free,       // any positive weight (internal graphs such as H)
};

// Per-vertex ordered index over incident (edge, weight) slots.
// A perfect binary tree of sums over leaf values; point updates recompute
// parent sums bottom-up, so setting a leaf back to its previous value
// restores every node bit-exactly.
class IncidenceIndex {
public:
    std::size_t add(double v);            // returns a slot, reusing freed ones
    void set(std::size_t slot, double v); // point update in O(log size)
    void remove(std::size_t slot);        // zero the slot and free it

    double value(std::size_t slot) const { return node_[cap_ + slot]; }
    double total() const { return cap_ ? node_[1] : 0.0; }
    std::size_t slot_bound() const { return used_; } // slots are in [0, slot_bound)

    // sum of values of slots [0, end)
    double prefix(std::size_t end) const;

    // slot s with prefix(s) <= x < prefix(s)+value(s); requires x in [0,total)
    std::size_t sample(double x) const;

private:
    void grow(std::size_t min_cap);

    std::size_t cap_ = 0;       // leaf count, power of two
    std::size_t used_ = 0;      // high-water slot index
    std::vector<double> node_;  // 1-based heap layout, size 2*cap_
    std::vector<std::size_t> free_;
};

struct EdgeRec {
    Vertex u = 0, v = 0;
    double w = 0.0;
    std::uint32_t slot_u = 0, slot_v = 0;
    bool alive = false;
};

// Undirected weighted multigraph with stable, never-reused edge ids.
// Vertices are dense 0..n-1, fixed at construction. Self-loops rejected,
// parallel edges allowed.
class MultiGraph {
public:
    explicit MultiGraph(std::size_t n, WeightMode mode = WeightMode::Unweighted,
                        double weight_exponent = 10.0);

    EdgeId insert_edge(Vertex u, Vertex v, double w = 1.0);
    void delete_edge(EdgeId e);

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return alive_edges_; }
    std::size_t edge_id_bound() const { return edges_.size(); } // ids are < bound
    WeightMode mode() const { return mode_; }
    double max_weight() const { return max_weight_; }
    double total_weight() const { return total_weight_; }

    bool edge_alive(EdgeId e) const { return e < edges_.size() && edges_[e].alive; }
    const EdgeRec& edge(EdgeId e) const;
    Vertex other_endpoint(EdgeId e, Vertex x) const;

    double weighted_degree(Vertex u) const { return index_[u].total(); }
    const IncidenceIndex& incidence(Vertex u) const { return index_[u]; }

    // neighbor -> parallel edge ids (ascending), alive edges only
    const std::map<Vertex, std::vector<EdgeId>>& neighbors(Vertex u) const { return adj_[u]; }
    double weight_between(Vertex u, Vertex v) const; // summed over parallels

    // picks (neighbor, edge) with probability w_e / d(u)
    std::pair<Vertex, EdgeId> weighted_random_neighbor(Vertex u, Rng& rng) const;

    // picks an incident edge of u with probability w_e / (d(u) - w(u, excluded)),
    // never landing in `excluded`; the incidence index is temporarily zeroed
    // and restored exactly. Requires positive remaining weight.
    std::pair<Vertex, EdgeId> weighted_random_neighbor_excluding(
        Vertex u, const std::vector<Vertex>& excluded, Rng& rng);

    template <typename F>
    void for_edges(F&& f) const {
        for (EdgeId e = 0; e < edges_.size(); ++e)
            if (edges_[e].alive) f(e, edges_[e]);
    }

    std::vector<int> components() const;                 // component id per vertex
    std::vector<EdgeId> edge_ids() const;                // alive, ascending

    // slot -> edge id mapping of u's incidence index (kNoEdge on free slots)
    EdgeId slot_edge(Vertex u, std::size_t slot) const { return slot_edge_[u][slot]; }

private:
    void check_vertex(Vertex u) const;

    std::size_t n_;
    WeightMode mode_;
    double max_weight_;
    std::size_t alive_edges_ = 0;
    double total_weight_ = 0.0;
    std::vector<EdgeRec> edges_;
    std::vector<IncidenceIndex> index_;
    std::vector<std::vector<EdgeId>> slot_edge_;
    std::vector<std::map<Vertex, std::vector<EdgeId>>> adj_;
};

} // namespace dynsc
