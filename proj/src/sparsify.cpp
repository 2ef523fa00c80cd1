#include "dynsc/sparsify.hpp"

#include <cmath>
#include <stdexcept>

#include "dynsc/exact_oracle.hpp"

namespace dynsc {

MultiGraph static_sparsify(const MultiGraph& g, double eps_s, Rng& rng) {
    if (!(eps_s > 0.0 && eps_s < 1.0)) throw std::invalid_argument("eps_s must be in (0,1)");
    const std::size_t n = g.vertex_count();
    double ln_n = std::log(std::max<double>(n, 2));
    double c = 8.0 * ln_n / (eps_s * eps_s);
    std::size_t target = static_cast<std::size_t>(std::ceil(c)) * std::max<std::size_t>(n, 1);
    MultiGraph out(n, WeightMode::Free);
    if (g.edge_count() <= target) {
        g.for_edges([&](EdgeId, const EdgeRec& e) { out.insert_edge(e.u, e.v, e.w); });
        return out;
    }
    Eigen::MatrixXd Lp = pinv(laplacian_matrix(g));
    g.for_edges([&](EdgeId, const EdgeRec& e) {
        double er = Lp(e.u, e.u) + Lp(e.v, e.v) - 2.0 * Lp(e.u, e.v);
        double p = std::min(1.0, c * e.w * std::max(0.0, er));
        if (p > 0.0 && rng.bernoulli(p)) out.insert_edge(e.u, e.v, e.w / p);
    });
    return out;
}

SparsifierBackend::SparsifierBackend(SparsifierMode mode, std::size_t n, double eps_s,
                                     std::size_t rebuild_every, std::uint64_t seed)
    : mode_(mode), n_(n), eps_s_(eps_s), rebuild_every_(rebuild_every), rng_(seed) {}

void SparsifierBackend::reset(const std::vector<std::pair<std::uint64_t, HEdge>>& initial) {
    mirror_.clear();
    for (const auto& [s, e] : initial) mirror_.emplace(s, e);
    ops_since_build_ = 0;
    view_dirty_ = true;
    if (mode_ == SparsifierMode::PeriodicStatic) resparsify();
}

void SparsifierBackend::apply_delta(const std::vector<HDelta>& deltas) {
    for (const HDelta& d : deltas) {
        if (d.removed) {
            auto it = mirror_.find(d.sample);
            if (it == mirror_.end()) throw std::invalid_argument("delta removes unknown H edge");
            mirror_.erase(it);
        }
        if (d.added) mirror_.emplace(d.sample, *d.added);
    }
    if (mode_ == SparsifierMode::PeriodicStatic) {
        ops_since_build_ += deltas.size();
        if (ops_since_build_ >= rebuild_every_) resparsify();
    } else {
        view_dirty_ = true;
    }
}

MultiGraph SparsifierBackend::materialize_exact() const {
    MultiGraph g(n_, WeightMode::Free);
    for (const auto& [s, e] : mirror_) {
        (void)s;
        g.insert_edge(e.a, e.b, e.w);
    }
    return g;
}

MultiGraph SparsifierBackend::materialize() const {
    if (mode_ == SparsifierMode::Identity) return materialize_exact();
    MultiGraph g(n_, WeightMode::Free);
    for (const HEdge& e : view_) g.insert_edge(e.a, e.b, e.w);
    return g;
}

std::size_t SparsifierBackend::edge_count() const {
    return mode_ == SparsifierMode::Identity ? mirror_.size() : view_.size();
}

void SparsifierBackend::resparsify() {
    MultiGraph h = materialize_exact();
    MultiGraph s = static_sparsify(h, eps_s_, rng_);
    view_.clear();
    s.for_edges([&](EdgeId, const EdgeRec& e) { view_.push_back({e.u, e.v, e.w}); });
    ops_since_build_ = 0;
    view_dirty_ = false;
}

} // namespace dynsc
