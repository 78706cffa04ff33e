#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsobolev/laguerre.hpp"
#include "lsobolev/sobolev_basis.hpp"

namespace lsobolev {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Which weighted space: L_p(x^alpha dx) or L_p(x^{alpha p/2} dx).
enum class BetaMode { beta_alpha, beta_p_alpha_over_2 };

const char* to_string(BetaMode mode);
BetaMode beta_mode_from_string(const std::string& s);

/// Throws DomainError unless (alpha, p) is admissible for the mode:
/// beta_alpha needs alpha > -1; beta_p_alpha_over_2 needs alpha > -2/p (p finite)
/// or alpha >= 0 (p = inf). p must lie in [1, inf].
void check_admissible(double alpha, double p, BetaMode mode);
bool is_admissible(double alpha, double p, BetaMode mode);

/// beta = alpha or alpha p / 2 (finite p only).
double beta_exponent(double alpha, double p, BetaMode mode);

/// (p_0, q_0): q_0 = (4 alpha + 4)/(2 alpha + 1) for beta_alpha (alpha > -1/2 required),
/// q_0 = 4 for beta_p_alpha_over_2, and 1/p_0 + 1/q_0 = 1.
std::pair<double, double> pollard_endpoints(double alpha, BetaMode mode);

struct NormOptions {
    double rel_tol = 1e-7;
    int max_rule = 16384;
    int sup_grid_points = 4096;
};

/// ||f||_{L_p(x^beta dx)}: (int |f(x) e^{-x/2}|^p x^beta dx)^{1/p}, or for p = inf
/// the sup of |f(x) e^{-x/2}| (times x^{alpha/2} for beta_p_alpha_over_2).
///
/// Convention: no 1/Gamma(alpha+1) factor, so ||l_n^alpha||_{L_2(x^alpha dx)} = sqrt(Gamma(alpha+1)).
/// For even integer p the substitution t = p x / 2 turns the integral into a Gauss rule for
/// t^beta e^{-t}; the rule size is doubled from `rule_size` (0 picks the exact size)
/// until two successive values agree to options.rel_tol. Other finite p are integrated
/// piecewise between the real zeros of f with double-exponential rules, since |f|^p is
/// not smooth there; a positive `rule_size` forces the Gauss path anyway.
double lp_norm(const LaguerreExpansion& f, double p, BetaMode mode, int rule_size = 0,
               const NormOptions& options = {});

/// ||f||_{S_p^beta}: adds sum_j M_j |f^{(j)}(0)|^p, or for p = inf takes the max with
/// |f^{(j)}(0)| over indices with M_j > 0.
double sobolev_space_norm(const LaguerreExpansion& f, double p, BetaMode mode, const SobolevProduct& S,
                          const NormOptions& options = {});

/// Probability-normalized p-mean (int |f|^p dmu)^{1/p}, dmu = x^alpha e^{-x} dx / Gamma(alpha+1).
double probability_mean(const LaguerreExpansion& f, double p);

/// n^{exponent} rate of ||q_n||_{L_p(x^beta dx)} for p above q_0:
/// alpha/2 - (alpha+1)/p (beta_alpha) or -1/p (beta_p_alpha_over_2).
double norm_growth_exponent(double alpha, double p, BetaMode mode);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys);
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

struct GrowthReport {
    double p = 0.0;
    BetaMode mode = BetaMode::beta_alpha;
    std::vector<std::pair<int, double>> points; // (n, value)
    LineFit loglog;                             // log value against log n
    bool log_case = false;                      // p equals q_0
    /// Correlation of value^p n^{p/4} with log(n+1); only meaningful when log_case.
    double log_correlation = 0.0;
    std::string convention = "unnormalized: int |f e^{-x/2}|^p x^beta dx, no 1/Gamma(alpha+1)";
};

/// ||q_n||_{L_p(x^beta dx)} over n_grid with its log-log fit.
GrowthReport norm_growth(const SobolevBasisCache& cache, double p, BetaMode mode, std::span<const int> n_grid,
                         const NormOptions& options = {});

} // namespace lsobolev
