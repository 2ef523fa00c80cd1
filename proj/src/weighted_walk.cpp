#include "dynsc/weighted_walk.hpp"

#include <algorithm>
#include <cmath>

namespace dynsc {

Eigen::VectorXd matrix_power_apply(const Eigen::MatrixXd& W, const Eigen::VectorXd& p0,
                                   std::uint64_t i) {
    Eigen::VectorXd v = p0;
    Eigen::MatrixXd sq = W;
    while (i > 0) {
        if (i & 1) v = sq * v;
        i >>= 1;
        if (i) sq = sq * sq;
    }
    return v;
}

std::uint64_t cover_step_bound(const MultiGraph& g, double c_cover) {
    double tw = std::max(1.0, g.total_weight());
    double m = c_cover * tw * tw * tw;
    double cap = 4.6e18; // keep within uint64
    return static_cast<std::uint64_t>(std::min(m, cap));
}

ExitTimeSampler::ExitTimeSampler(const MultiGraph& g, const std::vector<Vertex>& visited,
                                 Vertex current, std::uint64_t step_bound)
    : visited_(visited), bound_(step_bound) {
    const auto k = static_cast<Eigen::Index>(visited_.size());
    w_ = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index j = 0; j < k; ++j) {
        Vertex uj = visited_[static_cast<std::size_t>(j)];
        double d = g.weighted_degree(uj);
        double inside = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            double w = g.weight_between(uj, visited_[static_cast<std::size_t>(i)]);
            if (w > 0.0) {
                w_(i, j) = w / d;
                inside += w;
            }
        }
        w_(k, j) = std::max(0.0, d - inside) / d;
    }
    w_(k, k) = 1.0;
    p0_ = Eigen::VectorXd::Zero(k + 1);
    auto it = std::find(visited_.begin(), visited_.end(), current);
    if (it == visited_.end()) throw std::invalid_argument("current vertex not in visited set");
    p0_(static_cast<Eigen::Index>(it - visited_.begin())) = 1.0;
}

const Eigen::MatrixXd& ExitTimeSampler::square(std::size_t t) {
    if (squares_.empty()) squares_.push_back(w_);
    while (squares_.size() <= t) squares_.push_back(squares_.back() * squares_.back());
    return squares_[t];
}

Eigen::VectorXd ExitTimeSampler::apply_power(std::uint64_t i) {
    Eigen::VectorXd v = p0_;
    std::size_t bit = 0;
    while (i > 0) {
        if (i & 1) v = square(bit) * v;
        i >>= 1;
        ++bit;
    }
    return v;
}

double ExitTimeSampler::pnew(std::uint64_t i) {
    auto it = pnew_memo_.find(i);
    if (it != pnew_memo_.end()) return it->second;
    double p = apply_power(i)(w_.rows() - 1);
    pnew_memo_.emplace(i, p);
    return p;
}

Eigen::VectorXd ExitTimeSampler::confined_distribution(std::uint64_t steps) {
    Eigen::VectorXd v = apply_power(steps);
    return v.head(w_.rows() - 1);
}

bool ExitTimeSampler::cover_ok(std::size_t n, double delta) {
    double thresh = 1.0 - std::pow(static_cast<double>(std::max<std::size_t>(n, 2)), -delta);
    return pnew(bound_) >= thresh;
}

std::uint64_t ExitTimeSampler::sample(Rng& rng) {
    std::uint64_t lo = 0, hi = bound_;
    double lp = 0.0, rp = 1.0;
    while (lo != hi) {
        std::uint64_t eta = lo + (hi - lo) / 2;
        double pe = pnew(eta);
        double denom = rp - lp;
        double prob = denom > 1e-15 ? (pe - lp) / denom : (pe >= rp ? 1.0 : 0.0);
        prob = std::clamp(prob, 0.0, 1.0);
        if (rng.next_double() < prob) {
            hi = eta;
            rp = pe;
        } else {
            lo = eta + 1;
            lp = pe;
        }
    }
    return lo;
}

ExitEdge sample_exit_edge(MultiGraph& g, const std::vector<Vertex>& visited,
                          ExitTimeSampler& kernel, std::uint64_t exit_time, Rng& rng) {
    Eigen::VectorXd q = kernel.confined_distribution(exit_time - 1);
    std::vector<double> score(visited.size());
    double total = 0.0;
    for (std::size_t i = 0; i < visited.size(); ++i) {
        Vertex v = visited[i];
        double inside = 0.0;
        for (Vertex z : visited) inside += g.weight_between(v, z);
        double wout = std::max(0.0, g.weighted_degree(v) - inside);
        score[i] = q(static_cast<Eigen::Index>(i)) * wout;
        total += score[i];
    }
    if (!(total > 0.0)) throw std::runtime_error("no boundary edge leaves the visited set");
    std::size_t pick = pick_by_weight(score, rng.next_double() * total);
    // guard against zero-probability slots at prefix boundaries
    while (score[pick] == 0.0 && pick > 0) --pick;
    Vertex from = visited[pick];
    auto [to, edge] = g.weighted_random_neighbor_excluding(from, visited, rng);
    return {from, to, edge};
}

WeightedWalkParams weighted_params(std::size_t n, double beta, double epsilon, double c_dist) {
    WeightedWalkParams p;
    double ln_n = std::log(std::max<double>(n, 2));
    p.max_events = static_cast<std::uint32_t>(std::ceil(c_dist * ln_n / beta));
    p.epsilon = epsilon;
    return p;
}

std::vector<Vertex> WeightedWalkRecord::first_occurrences() const {
    if (len == 0) return {start};
    return {l_w.begin(), l_w.begin() + len};
}

std::vector<double> WeightedWalkRecord::subwalk_weights() const {
    if (len == 0) return {0.0};
    return {l_s.begin(), l_s.begin() + len};
}

namespace {

// weight of the confined sub-walk of length `steps` inside G[U] from `from`
// to `to`, within a (1+eps) factor. Uniform-ratio induced graphs collapse to
// the right endpoint of the achievable range; otherwise the full bucketed
// table is built on the induced graph.
double sample_subwalk_weight(MultiGraph& g, const std::vector<Vertex>& visited, Vertex from,
                             Vertex to, std::uint64_t steps, double eps, Rng& rng) {
    if (steps == 0) return 0.0;
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
    for (std::size_t i = 0; i < visited.size(); ++i) {
        for (std::size_t j = i + 1; j < visited.size(); ++j) {
            auto it = g.neighbors(visited[i]).find(visited[j]);
            if (it == g.neighbors(visited[i]).end()) continue;
            for (EdgeId e : it->second) {
                double w = g.edge(e).w;
                wmin = std::min(wmin, w);
                wmax = std::max(wmax, w);
            }
        }
    }
    if (!(wmax > 0.0)) throw std::runtime_error("confined sub-walk without internal edges");
    if (wmax <= (1.0 + eps) * wmin) return static_cast<double>(steps) / wmin;

    MultiGraph induced(visited.size(), WeightMode::Free);
    std::unordered_map<Vertex, Vertex> local;
    for (std::size_t i = 0; i < visited.size(); ++i)
        local[visited[i]] = static_cast<Vertex>(i);
    for (std::size_t i = 0; i < visited.size(); ++i) {
        for (std::size_t j = i + 1; j < visited.size(); ++j) {
            auto it = g.neighbors(visited[i]).find(visited[j]);
            if (it == g.neighbors(visited[i]).end()) continue;
            for (EdgeId e : it->second)
                induced.insert_edge(static_cast<Vertex>(i), static_cast<Vertex>(j),
                                    g.edge(e).w);
        }
    }
    return sample_weight(induced, local.at(from), local.at(to), steps, eps, rng);
}

} // namespace

WeightedWalkRecord generate_weighted_walk(MultiGraph& g, const TerminalSet& K, Vertex start,
                                          const WeightedWalkParams& params,
                                          const ComponentInfo& ci, Rng& rng) {
    WeightedWalkRecord rec;
    rec.start = start;
    if (K.contains(start)) {
        rec.status = WalkStatus::ReachedTerminal;
        rec.terminal = start;
        return rec;
    }
    if (!(g.weighted_degree(start) > 0.0)) {
        rec.status = WalkStatus::CoveredComponent;
        return rec;
    }
    std::size_t comp_vertices = ci.vertex_count[ci.comp[start]];
    std::uint64_t bound = cover_step_bound(g, params.c_cover);

    std::vector<Vertex> visited{start};
    Vertex cur = start;
    rec.status = WalkStatus::Truncated;
    for (std::uint32_t event = 0; event < params.max_events; ++event) {
        if (visited.size() >= comp_vertices) {
            rec.status = WalkStatus::CoveredComponent;
            break;
        }
        std::uint64_t exit_time;
        Vertex exit_from, exit_to;
        EdgeId edge;
        if (visited.size() == 1) {
            // singleton U always leaves on the first step
            exit_time = 1;
            auto [to, e] = g.weighted_random_neighbor(cur, rng);
            exit_from = cur;
            exit_to = to;
            edge = e;
        } else {
            ExitTimeSampler kernel(g, visited, cur, bound);
            if (!kernel.cover_ok(g.vertex_count(), params.cover_delta))
                throw std::runtime_error("cover bound violated in exit-time sampling");
            exit_time = kernel.sample(rng);
            ExitEdge ee = sample_exit_edge(g, visited, kernel, exit_time, rng);
            exit_from = ee.exit_from;
            exit_to = ee.exit_to;
            edge = ee.edge;
        }
        double s_sub = exit_time > 1
                           ? sample_subwalk_weight(g, visited, cur, exit_from, exit_time - 1,
                                                   params.epsilon, rng)
                           : 0.0;
        rec.l_w.push_back(exit_to);
        rec.l_s.push_back(s_sub + 1.0 / g.edge(edge).w);
        ++rec.len;
        if (K.contains(exit_to)) {
            rec.status = WalkStatus::ReachedTerminal;
            rec.terminal = exit_to;
            break;
        }
        visited.push_back(exit_to);
        cur = exit_to;
    }
    return rec;
}

void WeightedWalkStore::load(std::vector<WeightedWalkRecord>&& recs,
                             const std::vector<double>& origin_weights) {
    recs_ = std::move(recs);
    alive_.assign(recs_.size() / 2, 1);
    origin_weight_ = origin_weights;
    for (std::uint32_t id = 0; id < recs_.size(); ++id) {
        const WeightedWalkRecord& r = recs_[id];
        generated_steps_ += r.gen_len();
        by_vertex_[r.start].push_back({id, 0});
        for (std::uint32_t i = 0; i < r.gen_len(); ++i)
            by_vertex_[r.l_w[i]].push_back({id, i + 1});
    }
}

std::uint64_t WeightedWalkStore::add_trivial_pair(EdgeId origin, Vertex u, Vertex v,
                                                  double edge_weight) {
    std::uint64_t sample = sample_count();
    for (int side = 1; side <= 2; ++side) {
        WeightedWalkRecord r;
        r.origin_edge = origin;
        r.side = static_cast<std::uint8_t>(side);
        r.status = WalkStatus::ReachedTerminal;
        r.start = side == 1 ? u : v;
        r.terminal = r.start;
        recs_.push_back(std::move(r));
    }
    alive_.push_back(1);
    origin_weight_.push_back(edge_weight);
    return sample;
}

void WeightedWalkStore::retire_sample(std::uint64_t sample) { alive_[sample] = 0; }

std::optional<HEdge> WeightedWalkStore::pair_edge(const WeightedWalkRecord& w1,
                                                  const WeightedWalkRecord& w2,
                                                  double origin_weight) const {
    if (w1.status != WalkStatus::ReachedTerminal || w2.status != WalkStatus::ReachedTerminal)
        return std::nullopt;
    if (w1.terminal == w2.terminal) return std::nullopt;
    double s = w1.total_s() + w2.total_s() + 1.0 / origin_weight;
    return HEdge{w1.terminal, w2.terminal, 1.0 / (rho_ * s)};
}

std::optional<HEdge> WeightedWalkStore::sample_edge(std::uint64_t sample) const {
    if (!alive_[sample]) return std::nullopt;
    return pair_edge(recs_[2 * sample], recs_[2 * sample + 1], origin_weight_[sample]);
}

std::vector<Posting> WeightedWalkStore::walks_through(Vertex v) const {
    std::vector<Posting> out;
    for (const Posting& p : by_vertex_[v]) {
        if (!alive_[p.walk / 2]) continue;
        if (p.pos > recs_[p.walk].len) continue;
        out.push_back(p);
    }
    return out;
}

std::vector<HDelta> WeightedWalkStore::shorten_at(Vertex u) {
    std::vector<HDelta> deltas;
    for (const Posting& p : by_vertex_[u]) {
        std::uint64_t sample = p.walk / 2;
        if (!alive_[sample]) continue;
        WeightedWalkRecord& r = recs_[p.walk];
        if (p.pos > r.len) continue;
        if (p.pos == r.len && r.status == WalkStatus::ReachedTerminal) continue;

        std::optional<HEdge> before = sample_edge(sample);
        shortened_steps_ += r.len - p.pos;
        r.len = p.pos;
        r.status = WalkStatus::ReachedTerminal;
        r.terminal = u;
        std::optional<HEdge> after = sample_edge(sample);
        if (before != after) deltas.push_back({sample, before, after});
    }
    return deltas;
}

std::vector<std::optional<HEdge>> WeightedWalkStore::coupled_regeneration(
    const TerminalSet& T) const {
    std::vector<std::optional<HEdge>> out(sample_count());
    for (std::uint64_t s = 0; s < sample_count(); ++s) {
        if (!alive_[s]) continue;
        WeightedWalkRecord halves[2] = {recs_[2 * s], recs_[2 * s + 1]};
        for (WeightedWalkRecord& h : halves) {
            bool cut = false;
            if (T.contains(h.start)) {
                h.len = 0;
                h.status = WalkStatus::ReachedTerminal;
                h.terminal = h.start;
                cut = true;
            } else {
                for (std::uint32_t i = 0; i < h.gen_len(); ++i) {
                    if (T.contains(h.l_w[i])) {
                        h.len = i + 1;
                        h.status = WalkStatus::ReachedTerminal;
                        h.terminal = h.l_w[i];
                        cut = true;
                        break;
                    }
                }
            }
            if (!cut) h.len = h.gen_len();
        }
        out[s] = pair_edge(halves[0], halves[1], origin_weight_[s]);
    }
    return out;
}

} // namespace dynsc
