#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsobolev/laguerre.hpp"

namespace lsobolev {

/// <p,q>_S = (1/Gamma(alpha+1)) int p q x^alpha e^{-x} dx + sum_j M_j p^{(j)}(0) q^{(j)}(0).
///
/// An empty mass vector is allowed and means the plain Laguerre product
/// (N = -1); trailing zero masses are kept as given since N fixes how many
/// connection coefficients are reported.
class SobolevProduct {
public:
    SobolevProduct(double alpha, std::vector<double> masses);

    double alpha() const { return alpha_; }
    std::span<const double> masses() const { return masses_; }
    /// Highest derivative order carrying a mass slot: masses().size() - 1.
    int N() const { return static_cast<int>(masses_.size()) - 1; }
    double mass(int j) const;
    /// Indices j with M_j > 0, ascending.
    std::vector<int> positive_indices() const;
    bool all_zero() const { return positive_indices().empty(); }

private:
    double alpha_;
    std::vector<double> masses_;
};

struct SobolevBasisEntry {
    /// Orthonormal q_n in the {l_k^alpha} basis. The coefficient on l_n^alpha is
    /// positive, which is the same as q_n sharing the sign of L_n^alpha's leading term.
    LaguerreExpansion q;
    /// <Q_n, Q_n>_S for Q_n normalized to L_n^alpha's leading coefficient.
    double sobolev_norm_sq_Q = 0.0;
    /// q_n^{(k)}(0), k = 0..N+1, obtained from the construction recursions
    /// rather than by differentiating the expansion (the latter cancels badly
    /// when M_k > 0).
    std::vector<double> derivs_at_zero;
    /// b_0(n)..b_{N+1}(n); empty for n < N+1.
    std::vector<double> b;
};

class SobolevBasisCache {
public:
    SobolevBasisCache(SobolevProduct product, std::vector<SobolevBasisEntry> entries);

    const SobolevProduct& product() const { return product_; }
    double alpha() const { return product_.alpha(); }
    int n_max() const { return static_cast<int>(entries_.size()) - 1; }
    const SobolevBasisEntry& entry(int n) const;
    const LaguerreExpansion& q(int n) const { return entry(n).q; }

    /// Leading-coefficient-matched Q_n = sqrt(<Q_n,Q_n>_S) q_n.
    LaguerreExpansion Q(int n) const;

private:
    SobolevProduct product_;
    std::vector<SobolevBasisEntry> entries_;
};

double sobolev_inner(const LaguerreExpansion& f, const LaguerreExpansion& g, const SobolevProduct& S);

/// Stage recursion: one rank-one kernel correction per positive mass, in
/// increasing derivative order, with stage kernels accumulated in n.
SobolevBasisCache build_stagewise(const SobolevProduct& S, int n_max);

/// Independent construction: Q_n solves the bordered system
/// G[0..n-1, 0..n] c = 0 with G = I + sum_j M_j d_j d_j^T, reduced to an
/// r x r SPD system (r = number of positive masses) and factored by Cholesky.
SobolevBasisCache build_gram_oracle(const SobolevProduct& S, int n_max);

/// b_0(n)..b_{N+1}(n) in q_n = sum_j b_j(n) x^j l_{n-j}^{alpha+2j}, from the
/// lower-triangular derivative-ratio system. Requires n >= N+1.
std::vector<double> connection_coeffs(const SobolevBasisCache& cache, int n);

/// max over the (n+1)-point Gauss nodes of |q_n - sum_j b_j x^j l_{n-j}^{alpha+2j}| e^{-x/2},
/// relative to max |q_n| e^{-x/2} on the same nodes.
double representation_residual(const SobolevBasisCache& cache, int n, std::span<const double> b);

/// q_n^{(k)}(0) / (l_n^alpha)^{(k)}(0).
double q_deriv_ratio(const SobolevBasisCache& cache, int k, int n);

/// Versioned JSON document holding alpha, masses, n_max and every entry.
std::string serialize_cache(const SobolevBasisCache& cache);
SobolevBasisCache deserialize_cache(std::string_view json_text);

} // namespace lsobolev
