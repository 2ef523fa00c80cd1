#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dynsc/walk_engine.hpp"

namespace dynsc {

// Leverage-score static spectral sparsifier: edge e kept with probability
// min(1, 8 ln n * eps^-2 * w_e * ER(e)) at weight w_e / p_e. Graphs already
// below the target edge count are returned unchanged.
MultiGraph static_sparsify(const MultiGraph& g, double eps_s, Rng& rng);

enum class SparsifierMode : std::uint8_t { Identity, PeriodicStatic };

// Pluggable second-level sparsifier for H. Identity mirrors H exactly;
// periodic-static re-sparsifies the mirrored H every rebuild_every deltas.
// Stands in for a fully dynamic spectral sparsifier, which is treated as a
// black box behind this interface.
class SparsifierBackend {
public:
    SparsifierBackend(SparsifierMode mode, std::size_t n, double eps_s = 0.5,
                      std::size_t rebuild_every = 16, std::uint64_t seed = 0);

    void reset(const std::vector<std::pair<std::uint64_t, HEdge>>& initial);
    void apply_delta(const std::vector<HDelta>& deltas);

    SparsifierMode mode() const { return mode_; }
    // current H-tilde as a free-weight multigraph on the n vertices
    MultiGraph materialize() const;
    // exact mirror of H (for tests and for periodic re-sparsification)
    MultiGraph materialize_exact() const;
    std::size_t edge_count() const;

private:
    void resparsify();

    SparsifierMode mode_;
    std::size_t n_;
    double eps_s_;
    std::size_t rebuild_every_;
    std::size_t ops_since_build_ = 0;
    Rng rng_;
    std::map<std::uint64_t, HEdge> mirror_; // sample id -> live H edge
    bool view_dirty_ = true;
    std::vector<HEdge> view_; // sparsified view (periodic mode)
};

} // namespace dynsc
