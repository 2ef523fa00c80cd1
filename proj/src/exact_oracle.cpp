#include "dynsc/exact_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace dynsc {

namespace {

constexpr double kSupportTol = 1e-12;

std::vector<int> support_components(const Eigen::MatrixXd& L) {
    const auto n = static_cast<std::size_t>(L.rows());
    std::vector<int> comp(n, -1);
    int c = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = c;
        std::queue<std::size_t> q;
        q.push(s);
        while (!q.empty()) {
            std::size_t x = q.front();
            q.pop();
            for (std::size_t y = 0; y < n; ++y) {
                if (y != x && comp[y] < 0 && std::abs(L(x, y)) > kSupportTol) {
                    comp[y] = c;
                    q.push(y);
                }
            }
        }
        ++c;
    }
    return comp;
}

} // namespace

Eigen::MatrixXd laplacian_matrix(const MultiGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    g.for_edges([&](EdgeId, const EdgeRec& e) {
        L(e.u, e.u) += e.w;
        L(e.v, e.v) += e.w;
        L(e.u, e.v) -= e.w;
        L(e.v, e.u) -= e.w;
    });
    return L;
}

Eigen::MatrixXd laplacian_matrix(const MultiGraph& g, const std::vector<Vertex>& vertices) {
    std::vector<Eigen::Index> pos(g.vertex_count(), -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<Eigen::Index>(i);
    const auto k = static_cast<Eigen::Index>(vertices.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
    g.for_edges([&](EdgeId, const EdgeRec& e) {
        Eigen::Index a = pos[e.u], b = pos[e.v];
        if (a < 0 || b < 0) return;
        L(a, a) += e.w;
        L(b, b) += e.w;
        L(a, b) -= e.w;
        L(b, a) -= e.w;
    });
    return L;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& L) {
    if (L.rows() == 0) return L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    const Eigen::VectorXd& vals = es.eigenvalues();
    const Eigen::MatrixXd& vecs = es.eigenvectors();
    double lmax = vals.cwiseAbs().maxCoeff();
    double cut = 1e-10 * lmax;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (vals(i) > cut && vals(i) > 0.0) inv(i) = 1.0 / vals(i);
    return vecs * inv.asDiagonal() * vecs.transpose();
}

std::vector<int> matrix_components(const Eigen::MatrixXd& L) { return support_components(L); }

SchurResult exact_schur(const Eigen::MatrixXd& L, const std::vector<Vertex>& T) {
    SchurResult res;
    res.terminals = T;
    std::sort(res.terminals.begin(), res.terminals.end());
    res.terminals.erase(std::unique(res.terminals.begin(), res.terminals.end()),
                        res.terminals.end());
    const auto n = static_cast<std::size_t>(L.rows());
    for (Vertex t : res.terminals)
        if (t >= n) throw std::invalid_argument("terminal out of range");

    std::vector<char> is_t(n, 0);
    for (Vertex t : res.terminals) is_t[t] = 1;
    std::vector<Eigen::Index> tpos(n, -1);
    for (std::size_t i = 0; i < res.terminals.size(); ++i)
        tpos[res.terminals[i]] = static_cast<Eigen::Index>(i);

    const auto k = static_cast<Eigen::Index>(res.terminals.size());
    res.matrix = Eigen::MatrixXd::Zero(k, k);

    std::vector<int> comp = support_components(L);
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    for (int c = 0; c < ncomp; ++c) {
        std::vector<Eigen::Index> tc, fc;
        for (std::size_t v = 0; v < n; ++v) {
            if (comp[v] != c) continue;
            (is_t[v] ? tc : fc).push_back(static_cast<Eigen::Index>(v));
        }
        if (tc.empty()) {
            res.dropped_components.push_back(c);
            continue;
        }
        Eigen::MatrixXd Ltt(tc.size(), tc.size());
        for (std::size_t i = 0; i < tc.size(); ++i)
            for (std::size_t j = 0; j < tc.size(); ++j) Ltt(i, j) = L(tc[i], tc[j]);
        if (!fc.empty()) {
            Eigen::MatrixXd Lff(fc.size(), fc.size());
            for (std::size_t i = 0; i < fc.size(); ++i)
                for (std::size_t j = 0; j < fc.size(); ++j) Lff(i, j) = L(fc[i], fc[j]);
            Eigen::MatrixXd Lft(fc.size(), tc.size());
            for (std::size_t i = 0; i < fc.size(); ++i)
                for (std::size_t j = 0; j < tc.size(); ++j) Lft(i, j) = L(fc[i], tc[j]);
            Eigen::LLT<Eigen::MatrixXd> llt(Lff);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("singular F-block in exact_schur");
            Ltt -= Lft.transpose() * llt.solve(Lft);
        }
        for (std::size_t i = 0; i < tc.size(); ++i)
            for (std::size_t j = 0; j < tc.size(); ++j)
                res.matrix(tpos[tc[i]], tpos[tc[j]]) = Ltt(i, j);
    }
    return res;
}

double exact_er(const Eigen::MatrixXd& L, Vertex u, Vertex v) {
    return exact_er(L, pinv(L), u, v);
}

double exact_er(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Lp, Vertex u, Vertex v) {
    if (u == v) return 0.0;
    std::vector<int> comp = support_components(L);
    if (comp[u] != comp[v]) return std::numeric_limits<double>::infinity();
    return Lp(u, u) + Lp(v, v) - 2.0 * Lp(u, v);
}

Eigen::MatrixXd exact_projection(const Eigen::MatrixXd& L, const std::vector<Vertex>& T) {
    std::vector<Vertex> ts = T;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const auto n = static_cast<std::size_t>(L.rows());
    std::vector<char> is_t(n, 0);
    for (Vertex t : ts) is_t[t] = 1;
    std::vector<Eigen::Index> tpos(n, -1);
    for (std::size_t i = 0; i < ts.size(); ++i) tpos[ts[i]] = static_cast<Eigen::Index>(i);

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ts.size()),
                                              static_cast<Eigen::Index>(n));
    for (Vertex t : ts) P(tpos[t], t) = 1.0;

    std::vector<int> comp = support_components(L);
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    for (int c = 0; c < ncomp; ++c) {
        std::vector<Eigen::Index> tc, fc;
        for (std::size_t v = 0; v < n; ++v) {
            if (comp[v] != c) continue;
            (is_t[v] ? tc : fc).push_back(static_cast<Eigen::Index>(v));
        }
        if (tc.empty() || fc.empty()) continue;
        Eigen::MatrixXd Lff(fc.size(), fc.size());
        for (std::size_t i = 0; i < fc.size(); ++i)
            for (std::size_t j = 0; j < fc.size(); ++j) Lff(i, j) = L(fc[i], fc[j]);
        Eigen::MatrixXd Ltf(tc.size(), fc.size());
        for (std::size_t i = 0; i < tc.size(); ++i)
            for (std::size_t j = 0; j < fc.size(); ++j) Ltf(i, j) = L(tc[i], fc[j]);
        Eigen::LLT<Eigen::MatrixXd> llt(Lff);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("singular F-block in exact_projection");
        Eigen::MatrixXd block = -Ltf * llt.solve(Eigen::MatrixXd::Identity(
                                          static_cast<Eigen::Index>(fc.size()),
                                          static_cast<Eigen::Index>(fc.size())));
        for (std::size_t i = 0; i < tc.size(); ++i)
            for (std::size_t j = 0; j < fc.size(); ++j) P(tpos[tc[i]], fc[j]) = block(i, j);
    }
    return P;
}

Eigen::VectorXd hitting_probabilities(const MultiGraph& g, const std::vector<Vertex>& T,
                                      Vertex u) {
    std::vector<Vertex> ts = T;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ts.size()));
    std::vector<Eigen::Index> tpos(g.vertex_count(), -1);
    for (std::size_t i = 0; i < ts.size(); ++i) tpos[ts[i]] = static_cast<Eigen::Index>(i);

    if (tpos[u] >= 0) {
        out(tpos[u]) = 1.0;
        return out;
    }

    std::vector<int> comp = g.components();
    std::vector<Eigen::Index> fc, tc;
    std::vector<Eigen::Index> fpos(g.vertex_count(), -1);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (comp[v] != comp[u]) continue;
        if (tpos[v] >= 0) {
            tc.push_back(v);
        } else {
            fpos[v] = static_cast<Eigen::Index>(fc.size());
            fc.push_back(v);
        }
    }
    if (tc.empty()) throw std::runtime_error("no terminal reachable from start vertex");

    // (I - Q) Y = R over the transient states of the component
    const auto nf = static_cast<Eigen::Index>(fc.size());
    Eigen::MatrixXd IQ = Eigen::MatrixXd::Identity(nf, nf);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nf, static_cast<Eigen::Index>(tc.size()));
    std::vector<Eigen::Index> tcpos(g.vertex_count(), -1);
    for (std::size_t i = 0; i < tc.size(); ++i) tcpos[tc[i]] = static_cast<Eigen::Index>(i);
    for (Eigen::Index i = 0; i < nf; ++i) {
        Vertex x = static_cast<Vertex>(fc[i]);
        double d = g.weighted_degree(x);
        for (const auto& [y, ids] : g.neighbors(x)) {
            double w = 0.0;
            for (EdgeId e : ids) w += g.edge(e).w;
            if (fpos[y] >= 0)
                IQ(i, fpos[y]) -= w / d;
            else if (tcpos[y] >= 0)
                R(i, tcpos[y]) += w / d;
        }
    }
    Eigen::MatrixXd B = IQ.partialPivLu().solve(R);
    for (std::size_t j = 0; j < tc.size(); ++j)
        out(tpos[tc[j]]) = B(fpos[u], static_cast<Eigen::Index>(j));
    return out;
}

bool in_range_of(const Eigen::MatrixXd& L, const Eigen::VectorXd& b, double tol) {
    std::vector<int> comp = support_components(L);
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(ncomp);
    for (Eigen::Index v = 0; v < b.size(); ++v) sums(comp[v]) += b(v);
    double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return sums.cwiseAbs().maxCoeff() <= tol * scale;
}

double exact_energy(const Eigen::MatrixXd& L, const Eigen::VectorXd& b) {
    if (!in_range_of(L, b))
        throw std::invalid_argument("demand vector not in the range of L");
    return b.dot(pinv(L) * b);
}

SpectralCertificate check_spectral(const Eigen::MatrixXd& Lg, const Eigen::MatrixXd& Lh,
                                   double epsilon) {
    SpectralCertificate cert;
    cert.epsilon = epsilon;
    if (Lg.rows() != Lh.rows()) throw std::invalid_argument("dimension mismatch");
    const Eigen::Index n = Lg.rows();
    if (n == 0) {
        cert.ok = true;
        return cert;
    }

    // null spaces must agree: every component indicator of Lg must be
    // annihilated by Lh and vice versa
    std::vector<int> cg = support_components(Lg);
    std::vector<int> ch = support_components(Lh);
    double scale_h = std::max(1.0, Lh.cwiseAbs().maxCoeff());
    double scale_g = std::max(1.0, Lg.cwiseAbs().maxCoeff());
    int ncg = *std::max_element(cg.begin(), cg.end()) + 1;
    int nch = *std::max_element(ch.begin(), ch.end()) + 1;
    for (int c = 0; c < ncg; ++c) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (Eigen::Index v = 0; v < n; ++v)
            if (cg[v] == c) z(v) = 1.0;
        if ((Lh * z).cwiseAbs().maxCoeff() > 1e-8 * scale_h) {
            cert.ok = false;
            cert.witness = z;
            return cert;
        }
    }
    for (int c = 0; c < nch; ++c) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (Eigen::Index v = 0; v < n; ++v)
            if (ch[v] == c) z(v) = 1.0;
        if ((Lg * z).cwiseAbs().maxCoeff() > 1e-8 * scale_g) {
            cert.ok = false;
            cert.witness = z;
            return cert;
        }
    }

    // whiten by Lg over its range and look at extreme eigenvalues
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lg);
    const Eigen::VectorXd& vals = es.eigenvalues();
    double lmax = vals.cwiseAbs().maxCoeff();
    if (lmax == 0.0) {
        // Lg = 0: ok iff Lh = 0 (null-space check above already decided)
        cert.ok = true;
        return cert;
    }
    double cut = 1e-10 * lmax;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
        if (vals(i) > cut) keep.push_back(i);
    Eigen::MatrixXd W(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        W.col(static_cast<Eigen::Index>(j)) =
            es.eigenvectors().col(keep[j]) / std::sqrt(vals(keep[j]));
    Eigen::MatrixXd M = W.transpose() * Lh * W;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
    double lo = em.eigenvalues().minCoeff();
    double hi = em.eigenvalues().maxCoeff();
    const double slack = 1e-9;
    cert.ok = lo >= 1.0 - epsilon - slack && hi <= 1.0 + epsilon + slack;
    if (!cert.ok) {
        Eigen::Index which = (1.0 - lo > hi - 1.0) ? 0 : M.rows() - 1;
        cert.witness = W * em.eigenvectors().col(which);
    }
    return cert;
}

namespace {

template <typename MulFn>
Eigen::VectorXd pcg(const MulFn& mul, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                    double eps, const std::vector<int>& comp, Eigen::Index n) {
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<double> csz(ncomp, 0.0);
    for (Eigen::Index v = 0; v < n; ++v) csz[comp[v]] += 1.0;

    auto project = [&](Eigen::VectorXd& x) {
        std::vector<double> mean(ncomp, 0.0);
        for (Eigen::Index v = 0; v < n; ++v) mean[comp[v]] += x(v);
        for (int c = 0; c < ncomp; ++c) mean[c] /= csz[c];
        for (Eigen::Index v = 0; v < n; ++v) x(v) -= mean[comp[v]];
    };

    Eigen::VectorXd br = b;
    project(br); // kill out-of-range part
    double bnorm = br.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (bnorm == 0.0) return x;

    Eigen::VectorXd minv(n);
    for (Eigen::Index v = 0; v < n; ++v) minv(v) = diag(v) > 0.0 ? 1.0 / diag(v) : 0.0;

    double target = std::max(1e-14, eps * 1e-3) * bnorm;
    Eigen::VectorXd r = br;
    Eigen::VectorXd z = minv.asDiagonal() * r;
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    Eigen::VectorXd Lp(n);
    const std::size_t cap = 20 * static_cast<std::size_t>(n) + 40;
    for (std::size_t it = 0; it < cap; ++it) {
        if (r.norm() <= target) break;
        mul(p, Lp);
        double pLp = p.dot(Lp);
        if (pLp <= 0.0) break;
        double alpha = rz / pLp;
        x += alpha * p;
        r -= alpha * Lp;
        z = minv.asDiagonal() * r;
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    if (r.norm() > std::max(eps, 1e-12) * bnorm) {
        throw std::runtime_error("solve_lap failed to converge, residual " +
                                 std::to_string(r.norm() / bnorm));
    }
    project(x);
    return x;
}

} // namespace

Eigen::VectorXd solve_lap(const Eigen::MatrixXd& L, const Eigen::VectorXd& b, double eps) {
    std::vector<int> comp = support_components(L);
    auto mul = [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) { out.noalias() = L * p; };
    return pcg(mul, L.diagonal(), b, eps, comp, L.rows());
}

CsrMatrix CsrMatrix::laplacian(const MultiGraph& g) {
    CsrMatrix m;
    m.n = g.vertex_count();
    std::vector<std::size_t> cnt(m.n + 1, 0);
    for (Vertex u = 0; u < m.n; ++u) cnt[u + 1] = g.neighbors(u).size() + 1;
    m.row_ptr.resize(m.n + 1, 0);
    for (std::size_t u = 0; u < m.n; ++u) m.row_ptr[u + 1] = m.row_ptr[u] + cnt[u + 1];
    m.col.resize(m.row_ptr[m.n]);
    m.val.resize(m.row_ptr[m.n]);
    for (Vertex u = 0; u < m.n; ++u) {
        std::size_t at = m.row_ptr[u];
        double deg = 0.0;
        std::size_t diag_at = at++;
        for (const auto& [v, ids] : g.neighbors(u)) {
            double w = 0.0;
            for (EdgeId e : ids) w += g.edge(e).w;
            deg += w;
            m.col[at] = v;
            m.val[at] = -w;
            ++at;
        }
        m.col[diag_at] = u;
        m.val[diag_at] = deg;
    }
    return m;
}

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x(col[k]);
        y(static_cast<Eigen::Index>(i)) = acc;
    }
}

Eigen::VectorXd CsrMatrix::diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            if (col[k] == i) d(static_cast<Eigen::Index>(i)) = val[k];
    return d;
}

Eigen::VectorXd solve_lap(const CsrMatrix& L, const Eigen::VectorXd& b, double eps,
                          const std::vector<int>* components) {
    std::vector<int> comp;
    if (components) {
        comp = *components;
    } else {
        // derive from support
        comp.assign(L.n, -1);
        int c = 0;
        for (std::size_t s = 0; s < L.n; ++s) {
            if (comp[s] >= 0) continue;
            comp[s] = c;
            std::queue<std::size_t> q;
            q.push(s);
            while (!q.empty()) {
                std::size_t x = q.front();
                q.pop();
                for (std::size_t k = L.row_ptr[x]; k < L.row_ptr[x + 1]; ++k) {
                    std::size_t y = L.col[k];
                    if (y != x && comp[y] < 0 && std::abs(L.val[k]) > kSupportTol) {
                        comp[y] = c;
                        q.push(y);
                    }
                }
            }
            ++c;
        }
    }
    auto mul = [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) { L.multiply(p, out); };
    return pcg(mul, L.diagonal(), b, eps, comp, static_cast<Eigen::Index>(L.n));
}

} // namespace dynsc
