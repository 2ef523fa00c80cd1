#include "dynsc/walk_engine.hpp"

#include <ostream>
#include <unordered_set>

namespace dynsc {

ComponentInfo ComponentInfo::of(const MultiGraph& g) {
    ComponentInfo ci;
    ci.comp = g.components();
    int ncomp = ci.comp.empty() ? 0 : *std::max_element(ci.comp.begin(), ci.comp.end()) + 1;
    ci.edge_count.assign(ncomp, 0);
    ci.vertex_count.assign(ncomp, 0);
    for (Vertex v = 0; v < g.vertex_count(); ++v) ++ci.vertex_count[ci.comp[v]];
    g.for_edges([&](EdgeId, const EdgeRec& e) { ++ci.edge_count[ci.comp[e.u]]; });
    return ci;
}

WalkCaps unweighted_caps(std::size_t n, double beta, double c_dist, double c_len, double c_bf) {
    double ln_n = std::log(std::max<double>(n, 2));
    WalkCaps caps;
    caps.max_distinct_edges =
        static_cast<std::uint32_t>(std::ceil(c_dist * ln_n / beta));
    caps.max_steps =
        static_cast<std::uint64_t>(std::ceil(c_bf * c_len * ln_n * ln_n * ln_n / (beta * beta)));
    return caps;
}

Walk generate_unweighted_walk(const MultiGraph& g, const TerminalSet& T, Vertex start,
                              const WalkCaps& caps, const ComponentInfo& ci, Rng& rng) {
    Walk w;
    w.verts.push_back(start);
    if (T.contains(start)) {
        w.status = WalkStatus::ReachedTerminal;
        w.terminal = start;
        return w;
    }
    if (!(g.weighted_degree(start) > 0.0)) {
        w.status = WalkStatus::CoveredComponent;
        return w;
    }
    std::size_t comp_edges = ci.edge_count[ci.comp[start]];
    std::unordered_set<std::uint32_t> distinct;
    distinct.reserve(std::min<std::size_t>(2 * caps.max_distinct_edges + 1, 256));

    Vertex cur = start;
    std::uint64_t steps = 0;
    for (;;) {
        if (steps >= caps.max_steps) {
            w.status = WalkStatus::Truncated;
            break;
        }
        auto [next, e] = g.weighted_random_neighbor(cur, rng);
        w.verts.push_back(next);
        w.edges.push_back(static_cast<std::uint32_t>(e));
        ++steps;
        distinct.insert(static_cast<std::uint32_t>(e));
        cur = next;
        if (T.contains(cur)) {
            w.status = WalkStatus::ReachedTerminal;
            w.terminal = cur;
            break;
        }
        if (distinct.size() >= comp_edges) {
            w.status = WalkStatus::CoveredComponent;
            break;
        }
        if (distinct.size() >= caps.max_distinct_edges) {
            w.status = WalkStatus::Truncated;
            break;
        }
    }
    w.len = static_cast<std::uint32_t>(steps);
    return w;
}

void WalkStore::load(std::vector<Walk>&& walks) {
    walks_ = std::move(walks);
    alive_.assign(walks_.size() / 2, 1);
    origin_weight_.assign(walks_.size() / 2, 1.0);

    // first-occurrence postings via stamp arrays (no hashing)
    std::vector<std::uint32_t> vstamp(by_vertex_.size(), 0);
    std::vector<std::uint32_t> estamp(by_edge_.size(), 0);
    std::vector<std::size_t> vcount(by_vertex_.size(), 0), ecount(by_edge_.size(), 0);
    for (std::uint32_t id = 0; id < walks_.size(); ++id) {
        const Walk& w = walks_[id];
        generated_steps_ += w.gen_len();
        for (Vertex v : w.verts)
            if (vstamp[v] != id + 1) {
                vstamp[v] = id + 1;
                ++vcount[v];
            }
        for (std::uint32_t e : w.edges)
            if (estamp[e] != id + 1) {
                estamp[e] = id + 1;
                ++ecount[e];
            }
    }
    for (Vertex v = 0; v < by_vertex_.size(); ++v) by_vertex_[v].reserve(vcount[v]);
    for (std::size_t e = 0; e < by_edge_.size(); ++e) by_edge_[e].reserve(ecount[e]);
    std::fill(vstamp.begin(), vstamp.end(), 0);
    std::fill(estamp.begin(), estamp.end(), 0);
    for (std::uint32_t id = 0; id < walks_.size(); ++id) {
        const Walk& w = walks_[id];
        for (std::uint32_t p = 0; p < w.verts.size(); ++p) {
            Vertex v = w.verts[p];
            if (vstamp[v] != id + 1) {
                vstamp[v] = id + 1;
                by_vertex_[v].push_back({id, p});
            }
        }
        for (std::uint32_t p = 0; p < w.edges.size(); ++p) {
            std::uint32_t e = w.edges[p];
            if (estamp[e] != id + 1) {
                estamp[e] = id + 1;
                by_edge_[e].push_back({id, p});
            }
        }
    }
}

std::uint64_t WalkStore::add_trivial_pair(EdgeId origin, Vertex u, Vertex v,
                                          double edge_weight) {
    std::uint64_t sample = sample_count();
    for (int side = 1; side <= 2; ++side) {
        Walk w;
        w.origin_edge = origin;
        w.side = static_cast<std::uint8_t>(side);
        w.status = WalkStatus::ReachedTerminal;
        Vertex s = side == 1 ? u : v;
        w.terminal = s;
        w.verts.push_back(s);
        walks_.push_back(std::move(w));
    }
    alive_.push_back(1);
    origin_weight_.push_back(edge_weight);
    return sample;
}

void WalkStore::retire_sample(std::uint64_t sample) { alive_[sample] = 0; }

std::optional<HEdge> WalkStore::pair_edge(const Walk& w1, const Walk& w2,
                                          double origin_weight) const {
    if (w1.status != WalkStatus::ReachedTerminal || w2.status != WalkStatus::ReachedTerminal)
        return std::nullopt;
    if (w1.terminal == w2.terminal) return std::nullopt; // self-loop, no contribution
    double ell = static_cast<double>(w1.len) + static_cast<double>(w2.len) + 1.0;
    return HEdge{w1.terminal, w2.terminal, origin_weight / (rho_ * ell)};
}

std::optional<HEdge> WalkStore::sample_edge(std::uint64_t sample) const {
    if (!alive_[sample]) return std::nullopt;
    return pair_edge(walks_[2 * sample], walks_[2 * sample + 1], origin_weight_[sample]);
}

std::vector<Posting> WalkStore::walks_through(Vertex v) const {
    std::vector<Posting> out;
    for (const Posting& p : by_vertex_[v]) {
        if (!alive_[p.walk / 2]) continue;
        if (p.pos > walks_[p.walk].len) continue; // cut away
        out.push_back(p);
    }
    return out;
}

std::vector<HDelta> WalkStore::shorten_at(Vertex u) {
    std::vector<HDelta> deltas;
    for (const Posting& p : by_vertex_[u]) {
        std::uint64_t sample = p.walk / 2;
        if (!alive_[sample]) continue;
        Walk& w = walks_[p.walk];
        if (p.pos > w.len) continue; // first occurrence already cut away
        if (p.pos == w.len && w.status == WalkStatus::ReachedTerminal) continue;

        std::optional<HEdge> before = sample_edge(sample);
        shortened_steps_ += w.len - p.pos;
        w.len = p.pos;
        w.status = WalkStatus::ReachedTerminal;
        w.terminal = u;
        std::optional<HEdge> after = sample_edge(sample);
        if (before != after) deltas.push_back({sample, before, after});
    }
    return deltas;
}

void WalkStore::dump(std::ostream& out) const {
    for (std::uint32_t id = 0; id < walks_.size(); ++id) {
        const Walk& w = walks_[id];
        out << id << ' ';
        switch (w.status) {
        case WalkStatus::ReachedTerminal: out << "terminal(" << w.terminal << ")"; break;
        case WalkStatus::Truncated: out << "truncated"; break;
        case WalkStatus::CoveredComponent: out << "covered"; break;
        }
        for (std::uint32_t p = 0; p <= w.len; ++p) out << ' ' << w.verts[p];
        out << '\n';
    }
}

std::vector<std::optional<HEdge>> WalkStore::coupled_regeneration(const TerminalSet& T) const {
    std::vector<std::optional<HEdge>> out(sample_count());
    for (std::uint64_t s = 0; s < sample_count(); ++s) {
        if (!alive_[s]) continue;
        Walk halves[2] = {walks_[2 * s], walks_[2 * s + 1]};
        for (Walk& h : halves) {
            bool cut = false;
            for (std::uint32_t p = 0; p <= h.gen_len(); ++p) {
                if (T.contains(h.verts[p])) {
                    h.len = p;
                    h.status = WalkStatus::ReachedTerminal;
                    h.terminal = h.verts[p];
                    cut = true;
                    break;
                }
            }
            if (!cut) h.len = h.gen_len(); // generated status stands
        }
        out[s] = pair_edge(halves[0], halves[1], origin_weight_[s]);
    }
    return out;
}

} // namespace dynsc
