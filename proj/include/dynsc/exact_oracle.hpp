#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dynsc/multigraph.hpp"

namespace dynsc {

// Ground-truth dense linear algebra used to validate every approximate
// structure. Everything here is O(n^3)-ish and meant for desk-scale graphs.

Eigen::MatrixXd laplacian_matrix(const MultiGraph& g);

// Laplacian of a vertex-induced relabeling: vertices[i] of g becomes row i.
Eigen::MatrixXd laplacian_matrix(const MultiGraph& g, const std::vector<Vertex>& vertices);

// Moore-Penrose pseudoinverse via symmetric eigendecomposition,
// eigenvalue cutoff 1e-10 * lambda_max.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& L);

// component id per vertex, derived from the off-diagonal support of L
std::vector<int> matrix_components(const Eigen::MatrixXd& L);

struct SchurResult {
    std::vector<Vertex> terminals;     // sorted; indexes rows of `matrix`
    Eigen::MatrixXd matrix;            // Laplacian on `terminals`
    std::vector<int> dropped_components; // components with no terminal
};

// SC(G,T) = L[T,T] - L[T,F] L[F,F]^{-1} L[F,T], handled per component.
// Components without a terminal are dropped and recorded.
SchurResult exact_schur(const Eigen::MatrixXd& L, const std::vector<Vertex>& T);

// chi^T L^+ chi; +infinity when u and v are disconnected
double exact_er(const Eigen::MatrixXd& L, Vertex u, Vertex v);
double exact_er(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Lpinv, Vertex u, Vertex v);

// |T| x n matrix [ -L[T,F] L[F,F]^{-1}  I_T ]; rows follow sorted T.
// Columns in components without terminals are zero.
Eigen::MatrixXd exact_projection(const Eigen::MatrixXd& L, const std::vector<Vertex>& T);

// distribution over sorted T of the first T-vertex hit by a random walk
// from u; computed as an absorbing-chain solve, independent of
// exact_projection's block formula.
Eigen::VectorXd hitting_probabilities(const MultiGraph& g, const std::vector<Vertex>& T, Vertex u);

// b^T L^+ b; throws if b is not in the range of L (component sums nonzero)
double exact_energy(const Eigen::MatrixXd& L, const Eigen::VectorXd& b);

struct SpectralCertificate {
    double epsilon = 0.0;
    bool ok = false;
    Eigen::VectorXd witness; // maximizer of |x'(Lh-Lg)x| / x'Lg x when not ok
};

// decides (1-eps) x'Lg x <= x'Lh x <= (1+eps) x'Lg x over range(Lg)
SpectralCertificate check_spectral(const Eigen::MatrixXd& Lg, const Eigen::MatrixXd& Lh,
                                   double epsilon);

// Jacobi-preconditioned CG for L x = b, iteration cap 20n. Returns x with
// per-component zero mean; throws on non-convergence.
Eigen::VectorXd solve_lap(const Eigen::MatrixXd& L, const Eigen::VectorXd& b,
                          double eps = 1e-10);

// sparse CSR Laplacian operator for the same solver (harness-scale graphs)
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    static CsrMatrix laplacian(const MultiGraph& g);
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::VectorXd diagonal() const;
};

Eigen::VectorXd solve_lap(const CsrMatrix& L, const Eigen::VectorXd& b, double eps = 1e-10,
                          const std::vector<int>* components = nullptr);

// demand vector range check: per-component sums within tol
bool in_range_of(const Eigen::MatrixXd& L, const Eigen::VectorXd& b, double tol = 1e-8);

} // namespace dynsc
