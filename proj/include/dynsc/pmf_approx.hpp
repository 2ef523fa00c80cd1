#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dynsc/multigraph.hpp"
#include "dynsc/rng.hpp"

namespace dynsc {

// Bucketed (eps,j)-approximation of a probability mass function over walk
// weights. Bucket k represents the interval [ (1+eps0)^k, (1+eps0)^{k+j} );
// indices may be negative (weights >= 1 make 1/w <= 1). Mass below 1e-15 is
// dropped and the renormalization happens at sampling time.
struct BucketedPmf {
    double eps0 = 0.0;
    int j = 1;
    int kmin = 0;               // bucket index of mass[0]
    std::vector<double> mass;
    double total = 0.0;

    bool empty() const { return mass.empty() || total <= 0.0; }
    int kmax() const { return kmin + static_cast<int>(mass.size()) - 1; }
    double at(int k) const {
        int i = k - kmin;
        return (i >= 0 && i < static_cast<int>(mass.size())) ? mass[i] : 0.0;
    }
    void bump(int k, double v);
    void compact(); // trim zero margins, drop sub-1e-15 mass

    double bucket_lower(int k) const; // (1+eps0)^k
    int bucket_of(double x) const;    // k with x in [ (1+eps0)^k, (1+eps0)^{k+1} )

    static BucketedPmf point_mass(double eps0, double value, double p = 1.0);
};

// Alg-5 convolution: mass(k3) += g1(k1)*g2(k2) where
// (1+eps0)^{k1} + (1+eps0)^{k2} lands in I_{k3}^1; result j = max(j1,j2)+1.
// Throws if the result j would exceed j_max.
BucketedPmf convolute(const BucketedPmf& g1, const BucketedPmf& g2, int j_max);

// weighted bucketwise sum; j = max over parts
BucketedPmf mix(const std::vector<std::pair<double, const BucketedPmf*>>& parts);

struct PmfEntry {
    int j = 1;
    BucketedPmf g;   // conditional on the walk existing (total ~ 1 or 0)
    double p = 0.0;  // probability a length-ell walk from u ends at v
};

// Distribution table over all vertex pairs for the halving tree of one
// length. Built once per (graph snapshot, ell) and immutable afterwards.
class DistribTable {
public:
    DistribTable(const MultiGraph& g, std::uint64_t ell, double eps0);

    std::uint64_t length() const { return ell_; }
    double eps0() const { return eps0_; }
    const PmfEntry& entry(Vertex u, Vertex v) const; // for the full length
    const PmfEntry& entry(Vertex u, Vertex v, std::uint64_t ell) const;
    double reach_probability(Vertex u, Vertex v) const { return entry(u, v).p; }
    bool has_level(std::uint64_t ell) const { return levels_.count(ell) != 0; }

private:
    using Level = std::vector<PmfEntry>; // n*n row-major
    const Level& level(std::uint64_t ell);
    Level build_base() const;
    Level build_level(std::uint64_t ell);

    std::size_t n_;
    std::uint64_t ell_;
    double eps0_;
    int j_max_;
    std::map<std::uint64_t, Level> levels_;
    // base-case data captured from the graph snapshot
    std::vector<double> degree_;
    std::vector<std::vector<std::pair<Vertex, std::vector<double>>>> adj_w_;
};

// eps0 used by sample_weight for a total relative error eps over a
// length-ell halving tree
double pmf_eps0(double eps, std::uint64_t ell);

// Alg-7 sampling: right endpoint of the sampled interval, within
// [x, (1+eps)x] of a latent exact s(w) sample. Requires reach probability
// > 0 for (u,v,ell).
double sample_weight(const DistribTable& table, Vertex u, Vertex v, Rng& rng);
double sample_weight(const MultiGraph& g, Vertex u, Vertex v, std::uint64_t ell, double eps,
                     Rng& rng);

} // namespace dynsc
