#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>

#include "dynsc/pmf_approx.hpp"
#include "dynsc/walk_engine.hpp"

namespace dynsc {

// W^i p0 by repeated squaring
Eigen::VectorXd matrix_power_apply(const Eigen::MatrixXd& W, const Eigen::VectorXd& p0,
                                   std::uint64_t i);

// step bound for exit-time sampling: c_cover * (sum of edge weights)^3,
// clamped so it stays an exact integer in double/uint64 arithmetic
std::uint64_t cover_step_bound(const MultiGraph& g, double c_cover = 8.0);

// Exit-time kernel over the visited set U with current vertex u. Encodes
// the confined-walk recurrences in a (k+1)x(k+1) matrix whose last
// coordinate accumulates the probability of having left U. Squares of the
// matrix and p^new evaluations are cached, so one kernel can serve many
// draws on the same (g, U, u).
class ExitTimeSampler {
public:
    ExitTimeSampler(const MultiGraph& g, const std::vector<Vertex>& visited, Vertex current,
                    std::uint64_t step_bound);

    // probability the walk leaves U within the first i steps
    double pnew(std::uint64_t i);

    // confined sub-distribution over visited vertices after `steps` steps
    Eigen::VectorXd confined_distribution(std::uint64_t steps);

    // true when pnew(M) >= 1 - 1/n^delta
    bool cover_ok(std::size_t n, double delta = 2.0);

    // samples X(u,U), the first step index leaving U (Alg: binary search
    // over the p^new CDF). Requires cover_ok.
    std::uint64_t sample(Rng& rng);

    std::uint64_t step_bound() const { return bound_; }
    const Eigen::MatrixXd& matrix() const { return w_; }

private:
    const Eigen::MatrixXd& square(std::size_t t);
    Eigen::VectorXd apply_power(std::uint64_t i);

    std::vector<Vertex> visited_;
    std::uint64_t bound_;
    Eigen::MatrixXd w_;
    Eigen::VectorXd p0_;
    std::vector<Eigen::MatrixXd> squares_;
    std::unordered_map<std::uint64_t, double> pnew_memo_;
};

// samples the exit step (exit_from in U, exit_to outside U, edge id) given
// the exit time X; temporary incidence-index zeroing is undone internally
struct ExitEdge {
    Vertex exit_from = 0;
    Vertex exit_to = 0;
    EdgeId edge = kNoEdge;
};
ExitEdge sample_exit_edge(MultiGraph& g, const std::vector<Vertex>& visited,
                          ExitTimeSampler& kernel, std::uint64_t exit_time, Rng& rng);

struct WeightedWalkParams {
    std::uint32_t max_events = 0; // ceil(c_dist * beta^-1 * ln n) new-vertex events
    double epsilon = 0.25;        // relative error of each sub-walk weight
    double c_cover = 8.0;
    double cover_delta = 2.0;
};
WeightedWalkParams weighted_params(std::size_t n, double beta, double epsilon,
                                   double c_dist = 2.0);

// First-occurrence record of one weighted beta-shorted walk. l_w excludes
// the start vertex; len counts the retained entries, so the walk currently
// ends at l_w[len-1] (or at start when len == 0).
struct WeightedWalkRecord {
    EdgeId origin_edge = kNoEdge;
    std::uint8_t side = 1;
    WalkStatus status = WalkStatus::Truncated;
    Vertex terminal = 0;
    Vertex start = 0;
    std::uint32_t len = 0;
    std::vector<Vertex> l_w;
    std::vector<double> l_s;

    std::uint32_t gen_len() const { return static_cast<std::uint32_t>(l_w.size()); }
    Vertex end() const { return len ? l_w[len - 1] : start; }
    double total_s() const {
        double s = 0.0;
        for (std::uint32_t i = 0; i < len; ++i) s += l_s[i];
        return s;
    }
    // spec-facing views: a walk that ends at its start reports ([start],[0])
    std::vector<Vertex> first_occurrences() const;
    std::vector<double> subwalk_weights() const;
};

// Event-driven generation of a weighted beta-shorted walk (exit-time
// sampling, exit-edge sampling, then pmf-approximate sub-walk weights on
// the induced graph G[U]).
WeightedWalkRecord generate_weighted_walk(MultiGraph& g, const TerminalSet& K, Vertex start,
                                          const WeightedWalkParams& params,
                                          const ComponentInfo& ci, Rng& rng);

// Collection of weighted walk records with the same pairing and H-edge
// conventions as WalkStore; an H-edge weighs 1/(rho*s), s = s1 + s2 + 1/w_e.
class WeightedWalkStore {
public:
    WeightedWalkStore(std::size_t n, std::uint32_t rho) : rho_(rho), by_vertex_(n) {}

    void load(std::vector<WeightedWalkRecord>&& recs,
              const std::vector<double>& origin_weights);
    std::uint64_t add_trivial_pair(EdgeId origin, Vertex u, Vertex v, double edge_weight);
    void retire_sample(std::uint64_t sample);

    std::size_t walk_count() const { return recs_.size(); }
    std::size_t sample_count() const { return recs_.size() / 2; }
    const WeightedWalkRecord& walk(std::uint32_t id) const { return recs_[id]; }
    bool sample_alive(std::uint64_t s) const { return alive_[s] != 0; }
    std::uint32_t rho() const { return rho_; }

    std::optional<HEdge> sample_edge(std::uint64_t sample) const;
    std::vector<Posting> walks_through(Vertex v) const;
    std::vector<HDelta> shorten_at(Vertex u);
    std::vector<std::optional<HEdge>> coupled_regeneration(const TerminalSet& T) const;

    std::uint64_t generated_steps() const { return generated_steps_; }
    std::uint64_t shortened_steps() const { return shortened_steps_; }

private:
    std::optional<HEdge> pair_edge(const WeightedWalkRecord& w1,
                                   const WeightedWalkRecord& w2, double origin_weight) const;

    std::uint32_t rho_;
    std::vector<WeightedWalkRecord> recs_;
    std::vector<char> alive_;
    std::vector<double> origin_weight_;
    std::vector<std::vector<Posting>> by_vertex_; // pos 0 = start, i>=1 = l_w[i-1]
    std::uint64_t generated_steps_ = 0;
    std::uint64_t shortened_steps_ = 0;
};

} // namespace dynsc
