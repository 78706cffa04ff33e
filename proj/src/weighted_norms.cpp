#include "lsobolev/weighted_norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "lsobolev/errors.hpp"
#include "lsobolev/quadrature.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

const char* to_string(BetaMode mode) {
    return mode == BetaMode::beta_alpha ? "beta_alpha" : "beta_p_alpha_over_2";
}

BetaMode beta_mode_from_string(const std::string& s) {
    if (s == "alpha" || s == "beta_alpha")
        return BetaMode::beta_alpha;
    if (s == "palpha2" || s == "beta_p_alpha_over_2")
        return BetaMode::beta_p_alpha_over_2;
    throw DomainError("unknown beta mode '" + s + "' (expected alpha or palpha2)");
}

bool is_admissible(double alpha, double p, BetaMode mode) {
    if (!(alpha > -1.0) || !(p >= 1.0))
        return false;
    if (mode == BetaMode::beta_alpha)
        return true;
    return std::isinf(p) ? alpha >= 0.0 : alpha > -2.0 / p;
}

void check_admissible(double alpha, double p, BetaMode mode) {
    if (!is_admissible(alpha, p, mode))
        throw DomainError("inadmissible (alpha=" + std::to_string(alpha) + ", p=" + std::to_string(p) + ") for mode " +
                          to_string(mode));
}

double beta_exponent(double alpha, double p, BetaMode mode) {
    if (std::isinf(p))
        throw DomainError("beta_exponent is defined for finite p only");
    return mode == BetaMode::beta_alpha ? alpha : 0.5 * alpha * p;
}

std::pair<double, double> pollard_endpoints(double alpha, BetaMode mode) {
    double q0 = 4.0;
    if (mode == BetaMode::beta_alpha) {
        if (!(alpha > -0.5))
            throw DomainError("pollard_endpoints: beta_alpha requires alpha > -1/2");
        q0 = (4.0 * alpha + 4.0) / (2.0 * alpha + 1.0);
    } else if (!(alpha > -1.0)) {
        throw DomainError("pollard_endpoints requires alpha > -1");
    }
    return {q0 / (q0 - 1.0), q0};
}

namespace {

// ln int |f(x)|^p x^beta e^{-rate x} dx with an m-point rule.
double log_lp_integral(const LaguerreExpansion& f, double p, double beta, double rate, int m) {
    const auto rule = cached_quadrature(beta, m);
    std::vector<double> terms;
    terms.reserve(rule->size());
    const double to_x = 1.0 / rate;
    for (std::size_t i = 0; i < rule->size(); ++i) {
        const double la = eval_expansion_scaled(f, to_x * rule->nodes[i]).log_abs();
        if (std::isfinite(la))
            terms.push_back(rule->log_weights[i] + p * la);
    }
    return (beta + 1.0) * std::log(to_x) + log_sum_exp(terms);
}

bool is_even_integer(double p) { return std::fmod(p, 2.0) == 0.0; }

// Sign changes of f on (0, x_hi], refined to machine precision. The grid is
// uniform in sqrt(x), which is roughly how the zeros of degree-n Laguerre-type
// polynomials are spaced.
std::vector<double> positive_zeros(const LaguerreExpansion& f, double x_hi) {
    const int deg = std::max(f.degree(), 1);
    const double du = 1.0 / (16.0 * std::sqrt(deg + 1.0));
    const int pts = static_cast<int>(std::ceil(std::sqrt(x_hi) / du));
    std::vector<double> zeros;
    double x_prev = 0.0;
    double v_prev = 0.0;
    for (int i = 1; i <= pts; ++i) {
        const double u = std::sqrt(x_hi) * i / pts;
        const double x = u * u;
        const double v = eval_weighted(f, x);
        if (v != 0.0 && v_prev != 0.0 && (v > 0.0) != (v_prev > 0.0)) {
            auto g = [&](double t) { return eval_weighted(f, t); };
            boost::uintmax_t iters = 100;
            const auto [lo, hi] = boost::math::tools::toms748_solve(g, x_prev, x, v_prev, v,
                                                                    boost::math::tools::eps_tolerance<double>(), iters);
            zeros.push_back(0.5 * (lo + hi));
        }
        if (v != 0.0) {
            x_prev = x;
            v_prev = v;
        }
    }
    return zeros;
}

// Integrates |f|^p x^beta e^{-rate x} piecewise between consecutive real zeros of f,
// where the integrand is smooth apart from algebraic endpoint behaviour that the
// double-exponential rules absorb.
double split_lp_integral(const LaguerreExpansion& f, double p, double beta, double rate, const NormOptions& options) {
    const double x_hi = 4.0 * std::max(f.degree(), 1) + 2.0 * std::abs(f.alpha()) + 60.0 / std::min(rate, 1.0);
    auto integrand = [&](double x) {
        if (!(x > 0.0))
            return 0.0;
        const double la = eval_expansion_scaled(f, x).log_abs();
        if (!std::isfinite(la))
            return 0.0;
        return std::exp(p * la + beta * std::log(x) - rate * x);
    };
    std::vector<double> cuts{0.0};
    for (double z : positive_zeros(f, x_hi))
        cuts.push_back(z);

    const double tol = std::min(options.rel_tol * 1e-3, 1e-9);
    boost::math::quadrature::tanh_sinh<double> finite_rule;
    boost::math::quadrature::exp_sinh<double> tail_rule;
    CompensatedSum total;
    CompensatedSum total_err;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Integrate on [-1, 1] and rebuild x from the endpoint complement, which keeps
        // nodes clustered at a zero distinct from it.
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double half = 0.5 * (b - a);
        auto mapped = [&](double u, double uc) {
            const double x = u < 0.0 ? a - half * uc : b - half * uc;
            return half * integrand(x);
        };
        double err = 0.0;
        total.add(finite_rule.integrate(mapped, tol, &err));
        total_err.add(err);
    }
    double err = 0.0;
    total.add(tail_rule.integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity(), tol, &err));
    total_err.add(err);

    const double value = total.value();
    if (!(value > 0.0) || !std::isfinite(value) || total_err.value() > options.rel_tol * value)
        throw NumericFailure("lp_norm: piecewise integration error " + std::to_string(total_err.value()) +
                             " exceeds tolerance for integral " + std::to_string(value));
    return value;
}

double weighted_abs(const LaguerreExpansion& f, double x, double alpha, BetaMode mode) {
    double v = std::abs(eval_weighted(f, x));
    if (mode == BetaMode::beta_p_alpha_over_2)
        v *= std::pow(x, 0.5 * alpha);
    return v;
}

double sup_norm(const LaguerreExpansion& f, BetaMode mode, const NormOptions& options) {
    const double alpha = f.alpha();
    const int deg = std::max(f.degree(), 1);
    const int pts = std::max(options.sup_grid_points, 16);
    const double lo = std::log(1e-8);
    const double hi = std::log(8.0 * deg);
    std::vector<double> xs(static_cast<std::size_t>(pts));
    for (int i = 0; i < pts; ++i)
        xs[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (pts - 1));
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = weighted_abs(f, xs[i], alpha, mode);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    // Golden-section refinement on the bracketing grid cells.
    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[std::min(best + 1, xs.size() - 1)];
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = weighted_abs(f, c, alpha, mode);
    double fd = weighted_abs(f, d, alpha, mode);
    for (int it = 0; it < 80 && (b - a) > 1e-14 * b; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = weighted_abs(f, c, alpha, mode);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = weighted_abs(f, d, alpha, mode);
        }
    }
    double out = std::max({best_val, fc, fd});
    // The grid starts just above 0; the origin itself counts unless the x^{alpha/2} factor kills it.
    if (mode == BetaMode::beta_alpha || alpha == 0.0)
        out = std::max(out, std::abs(eval_expansion(f, 0.0)));
    return out;
}

// ln int |f|^p x^beta e^{-rate x} dx: Gauss rules doubled from the exact size for even
// integer p, piecewise double-exponential rules otherwise.
double log_weighted_integral(const LaguerreExpansion& f, double p, double beta, double rate, int rule_size,
                             const NormOptions& options) {
    if (!is_even_integer(p) && rule_size <= 0)
        return std::log(split_lp_integral(f, p, beta, rate, options));
    int m = rule_size;
    if (m <= 0)
        m = std::max(4, static_cast<int>(std::ceil((p * f.degree() + 1.0) / 2.0)));
    m = std::min(m, options.max_rule);
    double prev = log_lp_integral(f, p, beta, rate, m);
    while (true) {
        if (2 * m > options.max_rule)
            throw NumericFailure("lp_norm: rule doubling reached the cap at m=" + std::to_string(m) +
                                 " without agreement (last value " + std::to_string(std::exp(prev / p)) + ")");
        m *= 2;
        const double cur = log_lp_integral(f, p, beta, rate, m);
        // Relative agreement of the norms, measured through their logs.
        if (std::abs(std::expm1((cur - prev) / p)) <= options.rel_tol)
            return cur;
        prev = cur;
    }
}

} // namespace

double lp_norm(const LaguerreExpansion& f, double p, BetaMode mode, int rule_size, const NormOptions& options) {
    const double alpha = f.alpha();
    check_admissible(alpha, p, mode);
    if (f.degree() < 0)
        return 0.0;
    if (std::isinf(p))
        return sup_norm(f, mode, options);

    const double beta = beta_exponent(alpha, p, mode);
    return std::exp(log_weighted_integral(f, p, beta, 0.5 * p, rule_size, options) / p);
}

double sobolev_space_norm(const LaguerreExpansion& f, double p, BetaMode mode, const SobolevProduct& S,
                          const NormOptions& options) {
    if (f.alpha() != S.alpha())
        throw DomainError("sobolev_space_norm: expansion and product must share alpha");
    const double base = lp_norm(f, p, mode, 0, options);
    if (std::isinf(p)) {
        double out = base;
        for (int j : S.positive_indices())
            out = std::max(out, std::abs(expansion_deriv_zero(f, j)));
        return out;
    }
    CompensatedSum acc;
    acc.add(std::pow(base, p));
    for (int j : S.positive_indices())
        acc.add(S.mass(j) * std::pow(std::abs(expansion_deriv_zero(f, j)), p));
    return std::pow(acc.value(), 1.0 / p);
}

double probability_mean(const LaguerreExpansion& f, double p) {
    if (!(p >= 1.0) || std::isinf(p))
        throw DomainError("probability_mean requires finite p >= 1");
    if (f.degree() < 0)
        return 0.0;
    NormOptions tight;
    tight.rel_tol = 1e-10;
    const double alpha = f.alpha();
    return std::exp((log_weighted_integral(f, p, alpha, 1.0, 0, tight) - log_gamma(alpha + 1.0)) / p);
}

double norm_growth_exponent(double alpha, double p, BetaMode mode) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return mode == BetaMode::beta_alpha ? 0.5 * alpha - (alpha + 1.0) * inv_p : -inv_p;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("fit_line needs two or more paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_stderr = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return fit;
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("pearson_correlation needs two or more paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

GrowthReport norm_growth(const SobolevBasisCache& cache, double p, BetaMode mode, std::span<const int> n_grid,
                         const NormOptions& options) {
    const double alpha = cache.alpha();
    check_admissible(alpha, p, mode);
    GrowthReport report;
    report.p = p;
    report.mode = mode;
    std::vector<double> log_n, log_v;
    for (int n : n_grid) {
        const double v = lp_norm(cache.q(n), p, mode, 0, options);
        report.points.emplace_back(n, v);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_v.push_back(std::log(v));
    }
    report.loglog = fit_line(log_n, log_v);

    if (!std::isinf(p) && (mode == BetaMode::beta_p_alpha_over_2 || alpha > -0.5)) {
        const double q0 = pollard_endpoints(alpha, mode).second;
        report.log_case = std::abs(p - q0) <= 1e-12 * q0;
    }
    if (report.log_case) {
        std::vector<double> logs, rescaled;
        for (const auto& [n, v] : report.points) {
            logs.push_back(std::log(n + 1.0));
            rescaled.push_back(std::pow(v, p) * std::pow(static_cast<double>(n), p / 4.0));
        }
        report.log_correlation = pearson_correlation(logs, rescaled);
    }
    return report;
}

} // namespace lsobolev
