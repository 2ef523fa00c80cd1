#include "dynsc/schur_dynamic.hpp"

#include <cmath>
#include <omp.h>

namespace dynsc {

DynamicSC::DynamicSC(MultiGraph& g, const std::vector<Vertex>& t_prime, const ScConfig& cfg,
                     Rng rng)
    : g_(g), cfg_(cfg), rng_(rng), weighted_(g.mode() != WeightMode::Unweighted),
      terminals_(g.vertex_count()), h_graph_(g.vertex_count(), WeightMode::Free),
      backend_(cfg.sparsifier, g.vertex_count(), cfg.sparsifier_eps,
               cfg.sparsifier_rebuild_every, rng.split(0x5aa11ULL).state()) {
    const std::size_t n = g_.vertex_count();
    double ln_n = std::log(std::max<double>(n, 2));
    rho_ = static_cast<std::uint32_t>(
        std::ceil(cfg_.c_rho * ln_n / (cfg_.epsilon * cfg_.epsilon)));
    std::vector<EdgeId> edges = g_.edge_ids();
    budget_ = cfg_.budget_override
                  ? *cfg_.budget_override
                  : static_cast<std::uint64_t>(std::ceil(cfg_.beta * edges.size()));

    for (Vertex t : t_prime) terminals_.insert(t);
    if (!cfg_.presampled_terminals) {
        Rng ts = rng_.split(0xbe7aULL);
        for (EdgeId e : edges) {
            if (ts.bernoulli(cfg_.beta)) {
                terminals_.insert(g_.edge(e).u);
                terminals_.insert(g_.edge(e).v);
            }
        }
    }

    ComponentInfo ci = ComponentInfo::of(g_);
    const std::size_t samples = edges.size() * rho_;

    if (!weighted_) {
        WalkCaps caps = unweighted_caps(n, cfg_.beta, cfg_.c_dist, cfg_.c_len, cfg_.c_bf);
        std::vector<Walk> walks(2 * samples);
        const int threads = cfg_.parallel_init ? omp_get_max_threads() : 1;
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(samples); ++k) {
            EdgeId e = edges[static_cast<std::size_t>(k) / rho_];
            std::uint64_t copy = static_cast<std::uint64_t>(k) % rho_;
            const EdgeRec& rec = g_.edge(e);
            for (int side = 1; side <= 2; ++side) {
                Rng wr = rng_.split(e, copy, static_cast<std::uint64_t>(side));
                Walk w = generate_unweighted_walk(g_, terminals_, side == 1 ? rec.u : rec.v,
                                                  caps, ci, wr);
                w.origin_edge = e;
                w.side = static_cast<std::uint8_t>(side);
                walks[2 * static_cast<std::size_t>(k) + side - 1] = std::move(w);
            }
        }
        store_ = std::make_unique<WalkStore>(n, g_.edge_id_bound(), rho_);
        store_->load(std::move(walks));
    } else {
        WeightedWalkParams params =
            weighted_params(n, cfg_.beta, cfg_.epsilon, cfg_.c_dist);
        params.c_cover = cfg_.c_cover;
        params.cover_delta = cfg_.cover_delta;
        std::vector<WeightedWalkRecord> recs(2 * samples);
        std::vector<double> origin_w(samples);
        const int threads = cfg_.parallel_init ? omp_get_max_threads() : 1;
#pragma omp parallel num_threads(threads)
        {
            MultiGraph local = g_; // exit-edge sampling zeroes indices temporarily
#pragma omp for schedule(dynamic, 16)
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(samples); ++k) {
                EdgeId e = edges[static_cast<std::size_t>(k) / rho_];
                std::uint64_t copy = static_cast<std::uint64_t>(k) % rho_;
                const EdgeRec& rec = local.edge(e);
                origin_w[static_cast<std::size_t>(k)] = rec.w;
                for (int side = 1; side <= 2; ++side) {
                    Rng wr = rng_.split(e, copy, static_cast<std::uint64_t>(side));
                    WeightedWalkRecord r = generate_weighted_walk(
                        local, terminals_, side == 1 ? rec.u : rec.v, params, ci, wr);
                    r.origin_edge = e;
                    r.side = static_cast<std::uint8_t>(side);
                    recs[2 * static_cast<std::size_t>(k) + side - 1] = std::move(r);
                }
            }
        }
        wstore_ = std::make_unique<WeightedWalkStore>(n, rho_);
        wstore_->load(std::move(recs), origin_w);
    }

    for (std::size_t i = 0; i < edges.size(); ++i)
        origin_first_sample_[edges[i]] = static_cast<std::uint64_t>(i) * rho_;

    std::vector<std::pair<std::uint64_t, HEdge>> initial;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::optional<HEdge> he = sample_edge(s);
        if (!he) continue;
        EdgeId id = h_graph_.insert_edge(he->a, he->b, he->w);
        h_edge_of_sample_[s] = id;
        initial.emplace_back(s, *he);
    }
    backend_.reset(initial);
}

std::optional<HEdge> DynamicSC::sample_edge(std::uint64_t sample) const {
    return weighted_ ? wstore_->sample_edge(sample) : store_->sample_edge(sample);
}

std::size_t DynamicSC::sample_count() const {
    return weighted_ ? wstore_->sample_count() : store_->sample_count();
}

std::uint64_t DynamicSC::generated_steps() const {
    return weighted_ ? wstore_->generated_steps() : store_->generated_steps();
}

std::uint64_t DynamicSC::shortened_steps() const {
    return weighted_ ? wstore_->shortened_steps() : store_->shortened_steps();
}

void DynamicSC::charge_op() {
    if (ops_since_build_ >= budget_) throw BudgetExhaustedError{};
    ++ops_since_build_;
}

void DynamicSC::apply_deltas(const std::vector<HDelta>& deltas) {
    for (const HDelta& d : deltas) {
        if (d.removed) {
            auto it = h_edge_of_sample_.find(d.sample);
            h_graph_.delete_edge(it->second);
            h_edge_of_sample_.erase(it);
        }
        if (d.added) {
            EdgeId id = h_graph_.insert_edge(d.added->a, d.added->b, d.added->w);
            h_edge_of_sample_[d.sample] = id;
        }
    }
    backend_.apply_delta(deltas);
}

void DynamicSC::promote(Vertex u) {
    if (terminals_.contains(u)) return;
    terminals_.insert(u);
    std::vector<HDelta> deltas =
        weighted_ ? wstore_->shorten_at(u) : store_->shorten_at(u);
    apply_deltas(deltas);
}

void DynamicSC::add_terminal(Vertex u) {
    charge_op();
    promote(u);
}

EdgeId DynamicSC::insert_edge(Vertex u, Vertex v, double w) {
    charge_op();
    if (!weighted_ && w != 1.0)
        throw std::invalid_argument("unweighted mode requires weight 1");
    promote(u);
    promote(v);
    EdgeId e = g_.insert_edge(u, v, w);
    std::uint64_t first = weighted_ ? wstore_->sample_count() : store_->sample_count();
    origin_first_sample_[e] = first;
    std::vector<HDelta> deltas;
    deltas.reserve(rho_);
    for (std::uint32_t i = 0; i < rho_; ++i) {
        std::uint64_t s = weighted_ ? wstore_->add_trivial_pair(e, u, v, w)
                                    : store_->add_trivial_pair(e, u, v, w);
        deltas.push_back({s, std::nullopt, sample_edge(s)});
    }
    apply_deltas(deltas);
    return e;
}

void DynamicSC::delete_edge(EdgeId e) {
    charge_op();
    const EdgeRec& rec = g_.edge(e);
    if (!rec.alive) throw std::invalid_argument("unknown edge id");
    promote(rec.u);
    promote(rec.v);
    std::uint64_t first = origin_first_sample_.at(e);
    std::vector<HDelta> deltas;
    deltas.reserve(rho_);
    for (std::uint32_t i = 0; i < rho_; ++i) {
        std::uint64_t s = first + i;
        std::optional<HEdge> he = sample_edge(s);
        if (weighted_)
            wstore_->retire_sample(s);
        else
            store_->retire_sample(s);
        if (he) deltas.push_back({s, he, std::nullopt});
    }
    apply_deltas(deltas);
    origin_first_sample_.erase(e);
    g_.delete_edge(e);
}

TerminalGraph DynamicSC::current_sparsifier() const {
    std::vector<Vertex> ts = terminals_.sorted();
    std::vector<Vertex> pos(g_.vertex_count(), 0);
    for (std::size_t i = 0; i < ts.size(); ++i) pos[ts[i]] = static_cast<Vertex>(i);
    MultiGraph view = backend_.mode() == SparsifierMode::Identity
                          ? MultiGraph(0, WeightMode::Free)
                          : backend_.materialize();
    const MultiGraph& src = backend_.mode() == SparsifierMode::Identity ? h_graph_ : view;
    MultiGraph out(ts.size(), WeightMode::Free);
    src.for_edges([&](EdgeId, const EdgeRec& e) {
        out.insert_edge(pos[e.u], pos[e.v], e.w);
    });
    return {std::move(ts), std::move(out)};
}

std::vector<std::optional<HEdge>> DynamicSC::coupled_reference() const {
    return weighted_ ? wstore_->coupled_regeneration(terminals_)
                     : store_->coupled_regeneration(terminals_);
}

MultiGraph sample_schur_h(MultiGraph& g, const std::vector<Vertex>& terminals, double beta,
                          double epsilon, Rng rng, const ScConfig& base) {
    ScConfig cfg = base;
    cfg.beta = beta;
    cfg.epsilon = epsilon;
    cfg.presampled_terminals = true;
    DynamicSC ds(g, terminals, cfg, rng);
    return ds.h_graph();
}

} // namespace dynsc
