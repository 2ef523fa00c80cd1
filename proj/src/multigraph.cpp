#include "dynsc/multigraph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dynsc {

std::size_t IncidenceIndex::add(double v) {
    std::size_t slot;
    if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
    } else {
        slot = used_;
        if (slot >= cap_) grow(slot + 1);
        ++used_;
    }
    set(slot, v);
    return slot;
}

void IncidenceIndex::set(std::size_t slot, double v) {
    std::size_t i = cap_ + slot;
    node_[i] = v;
    for (i >>= 1; i >= 1; i >>= 1) node_[i] = node_[2 * i] + node_[2 * i + 1];
}

void IncidenceIndex::remove(std::size_t slot) {
    set(slot, 0.0);
    free_.push_back(slot);
}

double IncidenceIndex::prefix(std::size_t end) const {
    double acc = 0.0;
    // sum of leaves [0, end) by walking the tree
    std::size_t i = cap_ + end;
    while (i > 1) {
        if (i & 1) acc += node_[i - 1];
        i >>= 1;
    }
    return acc;
}

std::size_t IncidenceIndex::sample(double x) const {
    std::size_t i = 1;
    while (i < cap_) {
        i *= 2;
        if (x >= node_[i] && node_[i + 1] > 0.0) {
            x -= node_[i];
            ++i;
        }
    }
    return i - cap_;
}

void IncidenceIndex::grow(std::size_t min_cap) {
    std::size_t cap = cap_ ? cap_ : 1;
    while (cap < min_cap) cap *= 2;
    std::vector<double> fresh(2 * cap, 0.0);
    for (std::size_t s = 0; s < used_; ++s) fresh[cap + s] = node_[cap_ + s];
    node_ = std::move(fresh);
    cap_ = cap;
    for (std::size_t i = cap_ - 1; i >= 1; --i) node_[i] = node_[2 * i] + node_[2 * i + 1];
}

MultiGraph::MultiGraph(std::size_t n, WeightMode mode, double weight_exponent)
    : n_(n), mode_(mode) {
    max_weight_ = mode == WeightMode::Weighted
                      ? std::pow(std::max<double>(n, 2), weight_exponent)
                      : std::numeric_limits<double>::infinity();
    index_.resize(n_);
    slot_edge_.resize(n_);
    adj_.resize(n_);
}

void MultiGraph::check_vertex(Vertex u) const {
    if (u >= n_) throw std::invalid_argument("vertex out of range");
}

EdgeId MultiGraph::insert_edge(Vertex u, Vertex v, double w) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw std::invalid_argument("self-loop rejected");
    switch (mode_) {
    case WeightMode::Unweighted:
        if (w != 1.0) throw std::invalid_argument("unweighted graph requires weight 1");
        break;
    case WeightMode::Weighted:
        if (!(w >= 1.0) || w > max_weight_)
            throw std::invalid_argument("weight outside [1, n^c]");
        break;
    case WeightMode::Free:
        if (!(w > 0.0)) throw std::invalid_argument("weight must be positive");
        break;
    }

    EdgeId id = edges_.size();
    EdgeRec rec;
    rec.u = u;
    rec.v = v;
    rec.w = w;
    rec.alive = true;
    rec.slot_u = static_cast<std::uint32_t>(index_[u].add(w));
    rec.slot_v = static_cast<std::uint32_t>(index_[v].add(w));
    edges_.push_back(rec);

    auto place = [&](Vertex a, std::uint32_t slot) {
        auto& se = slot_edge_[a];
        if (se.size() <= slot) se.resize(slot + 1, kNoEdge);
        se[slot] = id;
    };
    place(u, rec.slot_u);
    place(v, rec.slot_v);
    adj_[u][v].push_back(id);
    adj_[v][u].push_back(id);
    ++alive_edges_;
    total_weight_ += w;
    return id;
}

void MultiGraph::delete_edge(EdgeId e) {
    if (!edge_alive(e)) throw std::invalid_argument("unknown edge id");
    EdgeRec& rec = edges_[e];
    rec.alive = false;
    index_[rec.u].remove(rec.slot_u);
    index_[rec.v].remove(rec.slot_v);
    slot_edge_[rec.u][rec.slot_u] = kNoEdge;
    slot_edge_[rec.v][rec.slot_v] = kNoEdge;
    auto unlink = [&](Vertex a, Vertex b) {
        auto it = adj_[a].find(b);
        auto& ids = it->second;
        ids.erase(std::find(ids.begin(), ids.end(), e));
        if (ids.empty()) adj_[a].erase(it);
    };
    unlink(rec.u, rec.v);
    unlink(rec.v, rec.u);
    --alive_edges_;
    total_weight_ -= rec.w;
}

const EdgeRec& MultiGraph::edge(EdgeId e) const {
    if (e >= edges_.size()) throw std::invalid_argument("unknown edge id");
    return edges_[e];
}

Vertex MultiGraph::other_endpoint(EdgeId e, Vertex x) const {
    const EdgeRec& rec = edge(e);
    return rec.u == x ? rec.v : rec.u;
}

double MultiGraph::weight_between(Vertex u, Vertex v) const {
    check_vertex(u);
    auto it = adj_[u].find(v);
    if (it == adj_[u].end()) return 0.0;
    double w = 0.0;
    for (EdgeId e : it->second) w += edges_[e].w;
    return w;
}

std::pair<Vertex, EdgeId> MultiGraph::weighted_random_neighbor(Vertex u, Rng& rng) const {
    check_vertex(u);
    double d = index_[u].total();
    if (!(d > 0.0)) throw std::runtime_error("isolated vertex has no neighbor");
    std::size_t slot = index_[u].sample(rng.next_double() * d);
    EdgeId e = slot_edge_[u][slot];
    return {other_endpoint(e, u), e};
}

std::pair<Vertex, EdgeId> MultiGraph::weighted_random_neighbor_excluding(
    Vertex u, const std::vector<Vertex>& excluded, Rng& rng) {
    check_vertex(u);
    // temporarily zero u->excluded slots, sample, then restore exactly
    std::vector<std::pair<std::uint32_t, double>> saved;
    for (Vertex z : excluded) {
        auto it = adj_[u].find(z);
        if (it == adj_[u].end()) continue;
        for (EdgeId e : it->second) {
            const EdgeRec& rec = edges_[e];
            std::uint32_t slot = rec.u == u ? rec.slot_u : rec.slot_v;
            saved.emplace_back(slot, rec.w);
            index_[u].set(slot, 0.0);
        }
    }
    double rem = index_[u].total();
    if (!(rem > 0.0)) {
        for (auto it = saved.rbegin(); it != saved.rend(); ++it)
            index_[u].set(it->first, it->second);
        throw std::runtime_error("no edge leaves the excluded set");
    }
    std::size_t slot = index_[u].sample(rng.next_double() * rem);
    EdgeId e = slot_edge_[u][slot];
    for (auto it = saved.rbegin(); it != saved.rend(); ++it)
        index_[u].set(it->first, it->second);
    return {other_endpoint(e, u), e};
}

std::vector<int> MultiGraph::components() const {
    std::vector<int> comp(n_, -1);
    int c = 0;
    for (Vertex s = 0; s < n_; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = c;
        std::queue<Vertex> q;
        q.push(s);
        while (!q.empty()) {
            Vertex x = q.front();
            q.pop();
            for (const auto& [y, ids] : adj_[x]) {
                (void)ids;
                if (comp[y] < 0) {
                    comp[y] = c;
                    q.push(y);
                }
            }
        }
        ++c;
    }
    return comp;
}

std::vector<EdgeId> MultiGraph::edge_ids() const {
    std::vector<EdgeId> ids;
    ids.reserve(alive_edges_);
    for (EdgeId e = 0; e < edges_.size(); ++e)
        if (edges_[e].alive) ids.push_back(e);
    return ids;
}

} // namespace dynsc
