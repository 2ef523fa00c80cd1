#include "dynsc/pmf_approx.hpp"

#include <cmath>
#include <stdexcept>

namespace dynsc {

namespace {
constexpr double kDropTol = 1e-15;
}

void BucketedPmf::bump(int k, double v) {
    if (mass.empty()) {
        kmin = k;
        mass.assign(1, 0.0);
    } else if (k < kmin) {
        mass.insert(mass.begin(), static_cast<std::size_t>(kmin - k), 0.0);
        kmin = k;
    } else if (k > kmax()) {
        mass.resize(static_cast<std::size_t>(k - kmin) + 1, 0.0);
    }
    mass[static_cast<std::size_t>(k - kmin)] += v;
    total += v;
}

void BucketedPmf::compact() {
    double dropped = 0.0;
    for (double& m : mass)
        if (m < kDropTol) {
            dropped += m;
            m = 0.0;
        }
    total -= dropped;
    std::size_t lo = 0, hi = mass.size();
    while (lo < hi && mass[lo] == 0.0) ++lo;
    while (hi > lo && mass[hi - 1] == 0.0) --hi;
    if (lo > 0 || hi < mass.size()) {
        mass = std::vector<double>(mass.begin() + static_cast<std::ptrdiff_t>(lo),
                                   mass.begin() + static_cast<std::ptrdiff_t>(hi));
        kmin += static_cast<int>(lo);
    }
    if (total < 0.0) total = 0.0;
}

double BucketedPmf::bucket_lower(int k) const { return std::exp(k * std::log1p(eps0)); }

int BucketedPmf::bucket_of(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("bucket_of requires positive value");
    double lnq = std::log1p(eps0);
    int k = static_cast<int>(std::floor(std::log(x) / lnq));
    // fix up floating point at interval boundaries
    while (bucket_lower(k) > x) --k;
    while (bucket_lower(k + 1) <= x) ++k;
    return k;
}

BucketedPmf BucketedPmf::point_mass(double eps0, double value, double p) {
    BucketedPmf g;
    g.eps0 = eps0;
    g.j = 1;
    g.bump(g.bucket_of(value), p);
    return g;
}

BucketedPmf convolute(const BucketedPmf& g1, const BucketedPmf& g2, int j_max) {
    if (g1.eps0 != g2.eps0) throw std::invalid_argument("convolute: eps0 mismatch");
    BucketedPmf out;
    out.eps0 = g1.eps0;
    out.j = std::max(g1.j, g2.j) + 1;
    if (out.j > j_max)
        throw std::runtime_error("pmf precision exhausted (j exceeds its bound)");
    if (g1.empty() || g2.empty()) {
        out.total = 0.0;
        return out;
    }
    // precompute lower endpoints for both index ranges
    auto lowers = [&](const BucketedPmf& g) {
        std::vector<double> lo(g.mass.size());
        for (std::size_t i = 0; i < g.mass.size(); ++i)
            lo[i] = g.bucket_lower(g.kmin + static_cast<int>(i));
        return lo;
    };
    std::vector<double> lo1 = lowers(g1), lo2 = lowers(g2);
    for (std::size_t i1 = 0; i1 < g1.mass.size(); ++i1) {
        if (g1.mass[i1] == 0.0) continue;
        for (std::size_t i2 = 0; i2 < g2.mass.size(); ++i2) {
            if (g2.mass[i2] == 0.0) continue;
            double le = lo1[i1] + lo2[i2];
            out.bump(out.bucket_of(le), g1.mass[i1] * g2.mass[i2]);
        }
    }
    out.compact();
    return out;
}

BucketedPmf mix(const std::vector<std::pair<double, const BucketedPmf*>>& parts) {
    BucketedPmf out;
    bool first = true;
    for (const auto& [p, g] : parts) {
        if (p < 0.0) throw std::invalid_argument("mix: negative weight");
        if (first) {
            out.eps0 = g->eps0;
            first = false;
        }
        out.j = std::max(out.j, g->j);
        for (std::size_t i = 0; i < g->mass.size(); ++i)
            if (g->mass[i] > 0.0) out.bump(g->kmin + static_cast<int>(i), p * g->mass[i]);
    }
    out.compact();
    return out;
}

DistribTable::DistribTable(const MultiGraph& g, std::uint64_t ell, double eps0)
    : n_(g.vertex_count()), ell_(ell), eps0_(eps0) {
    if (ell_ == 0) throw std::invalid_argument("DistribTable requires ell >= 1");
    int levels_needed = 1;
    for (std::uint64_t l = ell_; l > 1; l = (l + 1) / 2) ++levels_needed;
    j_max_ = levels_needed + 2;
    // capture the snapshot: degrees and per-neighbor parallel weights
    degree_.resize(n_);
    adj_w_.resize(n_);
    for (Vertex u = 0; u < n_; ++u) {
        degree_[u] = g.weighted_degree(u);
        for (const auto& [v, ids] : g.neighbors(u)) {
            std::vector<double> ws;
            ws.reserve(ids.size());
            for (EdgeId e : ids) ws.push_back(g.edge(e).w);
            adj_w_[u].emplace_back(v, std::move(ws));
        }
    }
    level(ell_);
}

const PmfEntry& DistribTable::entry(Vertex u, Vertex v) const { return entry(u, v, ell_); }

const PmfEntry& DistribTable::entry(Vertex u, Vertex v, std::uint64_t ell) const {
    auto it = levels_.find(ell);
    if (it == levels_.end()) throw std::invalid_argument("length not in the halving tree");
    return it->second[u * n_ + v];
}

const DistribTable::Level& DistribTable::level(std::uint64_t ell) {
    auto it = levels_.find(ell);
    if (it != levels_.end()) return it->second;
    Level lv = ell == 1 ? build_base() : build_level(ell);
    return levels_.emplace(ell, std::move(lv)).first->second;
}

DistribTable::Level DistribTable::build_base() const {
    Level lv(n_ * n_);
    for (Vertex u = 0; u < n_; ++u) {
        for (const auto& [v, ws] : adj_w_[u]) {
            PmfEntry& e = lv[u * n_ + v];
            double wsum = 0.0;
            for (double w : ws) wsum += w;
            // single step u -> v: edge chosen among parallels with odds w_e,
            // contributing value 1/w_e; p uses the source degree d(u)
            e.p = wsum / degree_[u];
            e.j = 1;
            e.g.eps0 = eps0_;
            e.g.j = 1;
            for (double w : ws) e.g.bump(e.g.bucket_of(1.0 / w), w / wsum);
            e.g.compact();
        }
        // entries without an edge stay (j=1, zero pmf, p=0)
        for (Vertex v = 0; v < n_; ++v) {
            PmfEntry& e = lv[u * n_ + v];
            if (e.g.eps0 == 0.0) e.g.eps0 = eps0_;
        }
    }
    return lv;
}

DistribTable::Level DistribTable::build_level(std::uint64_t ell) {
    std::uint64_t l1 = ell / 2, l2 = ell - ell / 2;
    const Level& a = level(l1);
    const Level& b = level(l2);
    Level lv(n_ * n_);
    for (Vertex u = 0; u < n_; ++u) {
        for (Vertex v = 0; v < n_; ++v) {
            PmfEntry& e = lv[u * n_ + v];
            e.g.eps0 = eps0_;
            std::vector<BucketedPmf> pieces;
            std::vector<std::pair<double, const BucketedPmf*>> parts;
            pieces.reserve(n_);
            double p = 0.0;
            for (Vertex y = 0; y < n_; ++y) {
                const PmfEntry& ea = a[u * n_ + y];
                const PmfEntry& eb = b[y * n_ + v];
                double py = ea.p * eb.p;
                if (py <= 0.0) continue;
                p += py;
                pieces.push_back(convolute(ea.g, eb.g, j_max_));
                e.j = std::max(e.j, pieces.back().j);
            }
            e.p = p;
            if (p > 0.0) {
                parts.reserve(pieces.size());
                std::size_t k = 0;
                for (Vertex y = 0; y < n_; ++y) {
                    const PmfEntry& ea = a[u * n_ + y];
                    const PmfEntry& eb = b[y * n_ + v];
                    double py = ea.p * eb.p;
                    if (py <= 0.0) continue;
                    parts.emplace_back(py / p, &pieces[k++]);
                }
                e.g = mix(parts);
                e.g.j = e.j;
            }
        }
    }
    return lv;
}

double pmf_eps0(double eps, std::uint64_t ell) {
    double levels = std::max(1.0, std::ceil(std::log2(static_cast<double>(ell))));
    return eps / (4.0 * levels);
}

double sample_weight(const DistribTable& table, Vertex u, Vertex v, Rng& rng) {
    const PmfEntry& e = table.entry(u, v);
    if (!(e.p > 0.0) || e.g.empty())
        throw std::runtime_error("sample_weight: (u,v,ell) unreachable");
    double x = rng.next_double() * e.g.total;
    double acc = 0.0;
    int k0 = e.g.kmax();
    for (std::size_t i = 0; i < e.g.mass.size(); ++i) {
        acc += e.g.mass[i];
        if (x < acc) {
            k0 = e.g.kmin + static_cast<int>(i);
            break;
        }
    }
    return e.g.bucket_lower(k0 + e.g.j);
}

double sample_weight(const MultiGraph& g, Vertex u, Vertex v, std::uint64_t ell, double eps,
                     Rng& rng) {
    if (ell == 0) return 0.0;
    DistribTable table(g, ell, pmf_eps0(eps, ell));
    return sample_weight(table, u, v, rng);
}

} // namespace dynsc
