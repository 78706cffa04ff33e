#include "lsobolev/cohen_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsobolev/errors.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

namespace {

constexpr double kDerivTolerance = 1e-9;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

} // namespace

CoefficientFamily::CoefficientFamily(Function c, std::string name) : c_(std::move(c)), name_(std::move(name)) {
    if (!c_)
        throw DomainError("CoefficientFamily needs a callable");
}

CoefficientFamily CoefficientFamily::partial_sums() {
    return CoefficientFamily([](int, int) { return 1.0; }, "partial_sums");
}

double a0j(double alpha, int n, int j) {
    double out = 1.0;
    for (int i = 1; i <= j; ++i)
        out *= n + alpha + i;
    return out;
}

double relative_deriv_at_zero(const LaguerreExpansion& f, int i) {
    CompensatedSum value;
    double scale = 0.0;
    for (int k = i; k <= f.degree(); ++k) {
        const double c = f[idx(k)];
        if (c == 0.0)
            continue;
        const double term = c * orthonormal_deriv_at_zero(f.alpha(), k, i);
        value.add(term);
        scale += std::abs(term);
    }
    return scale == 0.0 ? 0.0 : std::abs(value.value()) / scale;
}

TestFunction build_test_function(double alpha, const SobolevProduct& S, int n, int j) {
    if (alpha != S.alpha())
        throw DomainError("build_test_function: alpha differs from the product's");
    if (n < 0)
        throw DomainError("build_test_function: n must be nonnegative");
    if (j < S.N() + 1 || j < 0)
        throw DomainError("build_test_function: j = " + std::to_string(j) + " must be at least N+1 = " +
                          std::to_string(S.N() + 1));
    const int top = n + j + 2;
    const double gamma = alpha + j;
    const double s = std::sqrt((n + 1.0) * (n + 2.0) / ((n + gamma + 1.0) * (n + gamma + 2.0)));

    // Coefficients on the unnormalized L_k^{g}, g stepping down from alpha+j to alpha.
    std::vector<double> c(idx(top) + 1, 0.0);
    c[idx(n)] = 1.0;
    c[idx(n + 2)] = -s;
    for (int step = 0; step < j; ++step) {
        const double g = gamma - step;
        std::vector<double> next(c.size(), 0.0);
        for (int k = 0; k < top; ++k) {
            if (c[idx(k)] == 0.0)
                continue;
            next[idx(k)] += (k + g) * c[idx(k)];
            next[idx(k + 1)] -= (k + 1.0) * c[idx(k)];
        }
        c = std::move(next);
    }
    for (int k = n; k <= top; ++k)
        c[idx(k)] *= std::exp(0.5 * log_norm_sq_L(alpha, k));

    TestFunction out;
    out.n = n;
    out.j = j;
    out.expansion = LaguerreExpansion(alpha, std::move(c));
    for (int i = 0; i <= S.N(); ++i) {
        const double rel = relative_deriv_at_zero(out.expansion, i);
        if (!(rel <= kDerivTolerance))
            throw NumericFailure("build_test_function: derivative " + std::to_string(i) +
                                 " at 0 does not vanish (relative " + std::to_string(rel) + ", n=" +
                                 std::to_string(n) + ", j=" + std::to_string(j) + ")");
    }
    return out;
}

int choose_test_index(double alpha, const SobolevProduct& S, double p) {
    const double threshold = alpha - 0.5 - (std::isinf(p) ? 0.0 : 2.0 * (alpha + 1.0) / p);
    const int above = static_cast<int>(std::floor(threshold)) + 1;
    return std::max({S.N() + 1, 0, above});
}

double fourier_coeff(const LaguerreExpansion& f, int k, const SobolevBasisCache& cache) {
    const SobolevProduct& S = cache.product();
    if (f.alpha() != S.alpha())
        throw DomainError("fourier_coeff: alpha differs from the cache's");
    const SobolevBasisEntry& e = cache.entry(k);
    CompensatedSum acc;
    const std::size_t len = std::min(f.size(), e.q.size());
    for (std::size_t i = 0; i < len; ++i)
        acc.add(f[i] * e.q[i]);
    for (int i : S.positive_indices())
        acc.add(S.mass(i) * expansion_deriv_zero(f, i) * e.derivs_at_zero[idx(i)]);
    return acc.value();
}

double test_function_deriv_at_zero(const TestFunction& g, int i) {
    if (i < g.j)
        return 0.0;
    const double alpha = g.expansion.alpha();
    const double gamma = alpha + g.j;
    const int n = g.n;
    const double s = std::sqrt((n + 1.0) * (n + 2.0) / ((n + gamma + 1.0) * (n + gamma + 2.0)));
    const int r = i - g.j;
    double falling = 1.0;
    for (int t = 0; t < g.j; ++t)
        falling *= i - t;
    return falling * (deriv_at_zero(gamma, n, r) - s * deriv_at_zero(gamma, n + 2, r));
}

double fourier_coeff(const TestFunction& g, int k, const SobolevBasisCache& cache) {
    const SobolevProduct& S = cache.product();
    if (g.expansion.alpha() != S.alpha())
        throw DomainError("fourier_coeff: alpha differs from the cache's");
    const SobolevBasisEntry& e = cache.entry(k);
    CompensatedSum acc;
    const std::size_t len = std::min(g.expansion.size(), e.q.size());
    for (std::size_t i = 0; i < len; ++i)
        acc.add(g.expansion[i] * e.q[i]);
    for (int i : S.positive_indices())
        acc.add(S.mass(i) * test_function_deriv_at_zero(g, i) * e.derivs_at_zero[idx(i)]);
    return acc.value();
}

LaguerreExpansion apply_T(const LaguerreExpansion& f, const CoefficientFamily& c, int n,
                          const SobolevBasisCache& cache) {
    if (n < 0 || n > cache.n_max())
        throw DomainError("apply_T: n outside the cache");
    std::vector<double> out(idx(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double w = c(k, n) * fourier_coeff(f, k, cache);
        const LaguerreExpansion& q = cache.q(k);
        for (int i = 0; i <= k; ++i)
            out[idx(i)] += w * q[idx(i)];
    }
    return {cache.alpha(), std::move(out)};
}

double test_coeff_closed_form(const SobolevBasisCache& cache, int n, int j) {
    const double alpha = cache.alpha();
    return a0j(alpha, n, j) *
           std::exp(log_norm_sq_L(alpha, n) - 0.5 * std::log(cache.entry(n).sobolev_norm_sq_Q));
}

CohenBound cohen_lower_bound(int n, int j, double p, BetaMode mode, const CoefficientFamily& c,
                             const SobolevBasisCache& cache, const NormOptions& options) {
    const SobolevProduct& S = cache.product();
    check_admissible(S.alpha(), p, mode);
    if (j < 0)
        j = choose_test_index(S.alpha(), S, p);
    const TestFunction g = build_test_function(S.alpha(), S, n, j);

    CohenBound out;
    out.n = n;
    out.j = j;
    out.p = p;
    out.mode = mode;
    out.g_norm = sobolev_space_norm(g.expansion, p, mode, S, options);
    out.g_hat_n = test_coeff_closed_form(cache, n, j);
    out.g_hat_n_inner = fourier_coeff(g, n, cache);
    out.q_norm = lp_norm(cache.q(n), p, mode, 0, options);
    out.bound = std::abs(c(n, n)) * std::abs(out.g_hat_n) * out.q_norm / out.g_norm;
    return out;
}

double cohen_exponent(double alpha, double p, BetaMode mode) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return mode == BetaMode::beta_alpha ? alpha + 0.5 - (2.0 * alpha + 2.0) * inv_p : 0.5 - 2.0 * inv_p;
}

PollardRegion pollard_region(double alpha, double p, BetaMode mode) {
    const auto [p0, q0] = pollard_endpoints(alpha, mode);
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0); };
    if (std::isinf(p))
        return PollardRegion::above_q0;
    if (same(p, p0))
        return PollardRegion::at_p0;
    if (same(p, q0))
        return PollardRegion::at_q0;
    if (p < p0)
        return PollardRegion::below_p0;
    return p < q0 ? PollardRegion::inside : PollardRegion::above_q0;
}

const char* to_string(PollardRegion region) {
    switch (region) {
    case PollardRegion::below_p0:
        return "below_p0";
    case PollardRegion::at_p0:
        return "at_p0";
    case PollardRegion::inside:
        return "inside";
    case PollardRegion::at_q0:
        return "at_q0";
    case PollardRegion::above_q0:
        return "above_q0";
    }
    return "unknown";
}

} // namespace lsobolev
