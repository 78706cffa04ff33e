#pragma once

#include <memory>
#include <vector>

namespace lsobolev {

/// Gauss rule for the weight t^gamma e^{-t} on (0, inf).
struct QuadratureRule {
    double gamma = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    /// ln of each weight; stays finite where the weight itself underflows.
    std::vector<double> log_weights;
    int exact_degree = 0;

    std::size_t size() const { return nodes.size(); }
};

/// m-point generalized Gauss-Laguerre rule (exact to degree 2m-1).
///
/// Nodes are the eigenvalues of the Jacobi matrix of the monic recurrence,
/// polished by Newton steps on the orthonormal polynomial of degree m. Weights
/// come from the Christoffel function evaluated in logs, so nodes far in the
/// tail keep meaningful log-weights.
QuadratureRule build_quadrature(double gamma, int m);

/// Process-wide memo of immutable rules keyed by (gamma, m).
std::shared_ptr<const QuadratureRule> cached_quadrature(double gamma, int m);

/// Eigenvalues of the symmetric tridiagonal matrix (diag, offdiag) together with
/// the squared first components of the normalized eigenvectors, sorted ascending.
struct TridiagonalSpectrum {
    std::vector<double> eigenvalues;
    std::vector<double> first_component_sq;
};
TridiagonalSpectrum tridiagonal_eigen(std::vector<double> diag, std::vector<double> offdiag);

} // namespace lsobolev
