#pragma once

#include <span>
#include <vector>

namespace lsobolev {

/// Parameter of the Laguerre weight x^alpha e^{-x}; alpha > -1.
class LaguerreParam {
public:
    explicit LaguerreParam(double alpha);
    double alpha() const { return alpha_; }

private:
    double alpha_;
};

/// Polynomial stored by its coefficients in the orthonormal basis {l_k^alpha}
/// (orthonormal with respect to x^alpha e^{-x} dx / Gamma(alpha+1)).
class LaguerreExpansion {
public:
    LaguerreExpansion(double alpha, std::vector<double> coeffs);

    /// The basis vector e_n, i.e. l_n^alpha itself.
    static LaguerreExpansion basis(double alpha, int n);

    double alpha() const { return alpha_; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    /// Index of the last nonzero coefficient; -1 for the zero polynomial.
    int degree() const;

    double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

private:
    double alpha_;
    std::vector<double> coeffs_;
};

/// Value v = mantissa * exp(log_scale); used where l_n(x) exceeds double range.
struct ScaledValue {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double value() const;
    /// ln|v|, -inf for zero.
    double log_abs() const;
};

// Classical Laguerre polynomials, normalized by L_n^alpha(0) = C(n+alpha, n).

double eval_L(double alpha, int n, double x);

/// (L_n^alpha)^{(k)}(0) = (-1)^k Gamma(n+alpha+1) / ((n-k)! Gamma(alpha+k+1)); 0 for k > n.
double deriv_at_zero(double alpha, int n, int k);

/// ln|(L_n^alpha)^{(k)}(0)| for 0 <= k <= n.
double log_abs_deriv_at_zero(double alpha, int n, int k);

/// ||L_n^alpha||^2 = Gamma(n+alpha+1) / (n! Gamma(alpha+1)).
double norm_sq_L(double alpha, int n);
double log_norm_sq_L(double alpha, int n);

/// (l_n^alpha)^{(k)}(0).
double orthonormal_deriv_at_zero(double alpha, int n, int k);

/// Column d_k[i] = (l_i^alpha)^{(k)}(0), i = 0..n_max.
std::vector<double> orthonormal_deriv_column(double alpha, int n_max, int k);

/// K_n^{(k,h)}(0,0) = sum_{i<=n} (L_i)^{(k)}(0) (L_i)^{(h)}(0) / ||L_i||^2.
double kernel_deriv_zero(double alpha, int n, int k, int h);

/// K_n^{(0,h)}(x,0) as a function of x, expanded in {l_i^alpha}.
LaguerreExpansion kernel_expansion(double alpha, int n, int h);

/// sum_k coeffs[k] l_k^alpha(x) by Clenshaw's backward recurrence.
double eval_expansion(const LaguerreExpansion& f, double x);

/// Forward recurrence with periodic rescaling; valid where f(x) overflows.
ScaledValue eval_expansion_scaled(const LaguerreExpansion& f, double x);

/// f(x) e^{-x/2}, finite for every x >= 0.
double eval_weighted(const LaguerreExpansion& f, double x);

/// f^{(k)}(0) as the exact linear functional sum_i coeffs[i] (l_i)^{(k)}(0).
double expansion_deriv_zero(const LaguerreExpansion& f, int k);

/// ln sum_{k<m} l_k^alpha(x)^2 (inverse Christoffel function, in logs).
double log_christoffel_sum(double alpha, int m, double x);

} // namespace lsobolev
