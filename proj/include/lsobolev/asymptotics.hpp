#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lsobolev/sobolev_basis.hpp"

namespace lsobolev {

/// E_{alpha,j}(x) = sum_m (-1)^m x^{j+m} / (m! Gamma(alpha+2j+m+1)) = x^{-alpha/2} J_{alpha+2j}(2 sqrt x).
/// Requires x >= 0 and alpha + 2j > -1.
double bessel_entire(double alpha, int j, double x);

/// Limit of q_n(x/n) / n^{alpha/2}:
///   phi(x) = sum_j b_j sqrt(Gamma(alpha+2j+1)) E_{alpha,j}(x).
/// Each term carries the Gamma factor of its own parameter alpha+2j because the
/// representation uses orthonormal l_{n-j}^{alpha+2j}; with every b_j but b_0 zero
/// this is the classical sqrt(Gamma(alpha+1)) x^{-alpha/2} J_alpha(2 sqrt x).
class BesselLikeProfile {
public:
    BesselLikeProfile(double alpha, std::vector<double> b_limits);

    double alpha() const { return alpha_; }
    std::span<const double> b_limits() const { return b_; }
    double operator()(double x) const;

private:
    double alpha_;
    std::vector<double> b_;
    std::vector<double> scale_;
};

/// Uniform grid of `points` values on [0, x_max].
std::vector<double> uniform_grid(double x_max, int points);

/// l_n^alpha(x/(n+k_shift)) / n^{alpha/2} on the grid.
std::vector<double> mh_profile_laguerre(double alpha, int n, int k_shift, std::span<const double> xs);

/// q_n(x/n) / n^{alpha/2} on the grid.
std::vector<double> mh_profile_sobolev(const SobolevBasisCache& cache, int n, std::span<const double> xs);

struct LimitDiagnosis {
    double estimate = 0.0;
    /// Spread between the three-point estimates of the last two windows.
    double residual = 0.0;
    /// |value(n) - estimate| strictly decreases over the last three points.
    bool trend_ok = false;

    /// |estimate| > factor * residual.
    bool nonzero(double factor = 50.0) const;
};

/// Richardson-style extrapolation under value(n) = L + c h + d h^2 + ..., h = n^{-rate}
/// (rate 1 is the plain c/n model). Needs at least four points with strictly increasing n.
LimitDiagnosis limit_diagnose(std::span<const std::pair<double, double>> seq, double rate = 1.0);

/// Leading decay exponent of b_j(n) - b_j: min(1, alpha + 1), since b_0(n) ~ n^{-(alpha+1)} when M_0 > 0.
double connection_rate(double alpha);

/// Limit estimates of b_0..b_{N+1} from b_j(n) over the given degrees.
std::vector<LimitDiagnosis> connection_limits(const SobolevBasisCache& cache, std::span<const int> degrees);

/// Sign changes along a sampled curve, ignoring exact zeros.
int count_sign_changes(std::span<const double> values);

double sup_abs_deviation(std::span<const double> a, std::span<const double> b);

} // namespace lsobolev
