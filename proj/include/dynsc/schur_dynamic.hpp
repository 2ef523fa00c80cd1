#pragma once

#include <memory>
#include <unordered_map>

#include "dynsc/sparsify.hpp"
#include "dynsc/walk_engine.hpp"
#include "dynsc/weighted_walk.hpp"

namespace dynsc {

struct BudgetExhaustedError : std::runtime_error {
    BudgetExhaustedError() : std::runtime_error("operation budget exhausted; rebuild required") {}
};

struct ScConfig {
    double beta = 0.3;
    double epsilon = 0.5;
    double c_rho = 32.0;
    double c_dist = 2.0;
    double c_len = 4.0;
    double c_bf = 4.0;
    double c_cover = 8.0;
    double cover_delta = 2.0;
    bool presampled_terminals = false; // skip the internal beta-sample of T
    bool parallel_init = true;
    SparsifierMode sparsifier = SparsifierMode::Identity;
    double sparsifier_eps = 0.5;
    std::size_t sparsifier_rebuild_every = 16;
    std::optional<std::uint64_t> budget_override;
};

struct TerminalGraph {
    std::vector<Vertex> terminals; // sorted; graph vertex i is terminals[i]
    MultiGraph graph;
};

// Dynamic approximate Schur complement: maintains H (one weighted terminal
// edge per walk pair) and its sparsified view over Initialize / Insert /
// Delete / AddTerminal, with amortized walk shortening. Supports ceil(beta*m)
// operations between rebuilds; exceeding the budget throws
// BudgetExhaustedError and the caller owns the rebuild policy.
class DynamicSC {
public:
    DynamicSC(MultiGraph& g, const std::vector<Vertex>& t_prime, const ScConfig& cfg, Rng rng);

    void add_terminal(Vertex u);
    EdgeId insert_edge(Vertex u, Vertex v, double w = 1.0);
    void delete_edge(EdgeId e);

    const TerminalSet& terminals() const { return terminals_; }
    std::uint32_t rho() const { return rho_; }
    std::uint64_t budget() const { return budget_; }
    std::uint64_t ops_since_build() const { return ops_since_build_; }
    std::uint64_t ops_remaining() const { return budget_ - ops_since_build_; }
    bool needs_rebuild() const { return ops_since_build_ >= budget_; }

    // H as a multigraph on all n vertices (non-terminals isolated)
    const MultiGraph& h_graph() const { return h_graph_; }
    // the backend's current view restricted to the terminals
    TerminalGraph current_sparsifier() const;

    const WalkStore* unweighted_store() const { return store_.get(); }
    const WeightedWalkStore* weighted_store() const { return wstore_.get(); }
    const SparsifierBackend& backend() const { return backend_; }
    MultiGraph& graph() { return g_; }
    const MultiGraph& graph() const { return g_; }

    std::uint64_t generated_steps() const;
    std::uint64_t shortened_steps() const;

    // trajectory-coupled from-scratch H against the current terminal set
    // (testing oracle for the shortening path)
    std::vector<std::optional<HEdge>> coupled_reference() const;
    std::optional<HEdge> sample_edge(std::uint64_t sample) const;
    std::size_t sample_count() const;

private:
    void charge_op();
    void promote(Vertex u); // AddTerminal without the budget charge
    void apply_deltas(const std::vector<HDelta>& deltas);
    void register_sample_edge(std::uint64_t sample);

    MultiGraph& g_;
    ScConfig cfg_;
    Rng rng_;
    bool weighted_;
    std::uint32_t rho_;
    std::uint64_t budget_;
    std::uint64_t ops_since_build_ = 0;
    TerminalSet terminals_;
    std::unique_ptr<WalkStore> store_;
    std::unique_ptr<WeightedWalkStore> wstore_;
    std::unordered_map<EdgeId, std::uint64_t> origin_first_sample_;
    MultiGraph h_graph_;
    std::unordered_map<std::uint64_t, EdgeId> h_edge_of_sample_;
    SparsifierBackend backend_;
};

// static sampling of an approximate Schur complement onto a fixed terminal
// set (initialization path only; used by the sampling-correctness checks)
MultiGraph sample_schur_h(MultiGraph& g, const std::vector<Vertex>& terminals, double beta,
                          double epsilon, Rng rng, const ScConfig& base = {});

} // namespace dynsc
