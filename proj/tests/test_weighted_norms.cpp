#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "lsobolev/errors.hpp"
#include "lsobolev/laguerre.hpp"
#include "lsobolev/sobolev_basis.hpp"
#include "lsobolev/special.hpp"
#include "lsobolev/weighted_norms.hpp"

using namespace lsobolev;

namespace {

// (int_0^inf |f e^{-x/2}|^p x^beta dx)^{1/p} for a low degree f: fixed panels of
// width 0.1 on [0, 60], which keep any kink of |f|^p inside one small panel, plus a tail.
double brute_lp(const LaguerreExpansion& f, double p, double beta) {
    auto F = [&](double x) {
        if (x > 1400.0)
            return 0.0;
        return std::pow(std::abs(eval_expansion(f, x) * std::exp(-x / 2)), p) * std::pow(x, beta);
    };
    boost::math::quadrature::tanh_sinh<double> panel;
    boost::math::quadrature::exp_sinh<double> tail;
    double v = tail.integrate(F, 60.0, std::numeric_limits<double>::infinity(), 1e-13);
    for (int i = 0; i < 600; ++i)
        v += panel.integrate(F, 0.1 * i, 0.1 * (i + 1), 1e-13);
    return std::pow(v, 1.0 / p);
}

} // namespace

TEST_CASE("admissibility") {
    CHECK(is_admissible(-0.9, 3.0, BetaMode::beta_alpha));
    CHECK_FALSE(is_admissible(-1.0, 3.0, BetaMode::beta_alpha));
    CHECK(is_admissible(-0.2, 8.0, BetaMode::beta_p_alpha_over_2));
    CHECK_FALSE(is_admissible(-0.3, 8.0, BetaMode::beta_p_alpha_over_2));
    CHECK_FALSE(is_admissible(-0.1, kInfinity, BetaMode::beta_p_alpha_over_2));
    CHECK(is_admissible(0.0, kInfinity, BetaMode::beta_p_alpha_over_2));
    CHECK_FALSE(is_admissible(0.0, 0.5, BetaMode::beta_alpha));
    CHECK_THROWS_AS(check_admissible(-0.5, kInfinity, BetaMode::beta_p_alpha_over_2), DomainError);
    CHECK(beta_exponent(0.5, 6.0, BetaMode::beta_p_alpha_over_2) == doctest::Approx(1.5));
    CHECK(beta_mode_from_string("palpha2") == BetaMode::beta_p_alpha_over_2);
    CHECK(beta_mode_from_string("alpha") == BetaMode::beta_alpha);
    CHECK_THROWS_AS(beta_mode_from_string("gamma"), DomainError);
}

TEST_CASE("Pollard endpoints") {
    auto [p0, q0] = pollard_endpoints(0.0, BetaMode::beta_alpha);
    CHECK(p0 == doctest::Approx(4.0 / 3.0));
    CHECK(q0 == doctest::Approx(4.0));
    std::tie(p0, q0) = pollard_endpoints(0.5, BetaMode::beta_alpha);
    CHECK(p0 == doctest::Approx(1.5));
    CHECK(q0 == doctest::Approx(3.0));
    for (double a : {-0.3, 0.0, 2.0}) {
        std::tie(p0, q0) = pollard_endpoints(a, BetaMode::beta_p_alpha_over_2);
        CHECK(p0 == doctest::Approx(4.0 / 3.0));
        CHECK(q0 == doctest::Approx(4.0));
    }
    CHECK_THROWS_AS(pollard_endpoints(-0.5, BetaMode::beta_alpha), DomainError);
}

TEST_CASE("L2 norm examples") {
    CHECK(lp_norm(LaguerreExpansion::basis(0.0, 0), 2.0, BetaMode::beta_alpha) == doctest::Approx(1.0));
    for (double a : {-0.5, 0.5, 1.0})
        for (int n : {0, 5, 40})
            CHECK(lp_norm(LaguerreExpansion::basis(a, n), 2.0, BetaMode::beta_alpha) ==
                  doctest::Approx(std::sqrt(std::tgamma(a + 1.0))).epsilon(1e-8));
    for (int n : {1, 50, 120})
        CHECK(lp_norm(LaguerreExpansion::basis(0.0, n), 2.0, BetaMode::beta_alpha) ==
              doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lp_norm against direct integration") {
    const LaguerreExpansion f(0.5, {0.3, -1.0, 0.7, 0.2});
    for (double p : {1.0, 3.0, 4.0, 5.5})
        for (BetaMode mode : {BetaMode::beta_alpha, BetaMode::beta_p_alpha_over_2}) {
            const double beta = beta_exponent(0.5, p, mode);
            CHECK(lp_norm(f, p, mode) == doctest::Approx(brute_lp(f, p, beta)).epsilon(1e-7));
        }
}

TEST_CASE("sup norm") {
    // e^{-x/2} is maximal at 0; x^{1/2} e^{-x/2} at x = 1.
    const LaguerreExpansion one = LaguerreExpansion::basis(1.0, 0);
    CHECK(lp_norm(one, kInfinity, BetaMode::beta_alpha) == doctest::Approx(1.0 / std::sqrt(norm_sq_L(1.0, 0))));
    CHECK(lp_norm(one, kInfinity, BetaMode::beta_p_alpha_over_2) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
    // l_n^0 e^{-x/2} is bounded by 1 and attains it at 0.
    for (int n : {25, 100, 200})
        CHECK(lp_norm(LaguerreExpansion::basis(0.0, n), kInfinity, BetaMode::beta_alpha) ==
              doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sobolev_space_norm") {
    const LaguerreExpansion f(0.0, {0.3, -1.0, 0.7});
    const SobolevProduct none(0.0, {0.0, 0.0});
    for (double p : {2.0, 4.0, kInfinity})
        CHECK(sobolev_space_norm(f, p, BetaMode::beta_alpha, none) == lp_norm(f, p, BetaMode::beta_alpha));
    const SobolevProduct S(0.0, {1.0});
    const LaguerreExpansion c = LaguerreExpansion(0.0, {3.0});
    CHECK(sobolev_space_norm(c, kInfinity, BetaMode::beta_alpha, S) == doctest::Approx(3.0));
    const SobolevProduct S2(0.0, {2.0, 0.5});
    const double p = 3.0;
    const double expected = std::pow(std::pow(lp_norm(f, p, BetaMode::beta_alpha), p) +
                                         2.0 * std::pow(std::abs(expansion_deriv_zero(f, 0)), p) +
                                         0.5 * std::pow(std::abs(expansion_deriv_zero(f, 1)), p),
                                     1.0 / p);
    CHECK(sobolev_space_norm(f, p, BetaMode::beta_alpha, S2) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("Hoelder monotonicity of the probability p-mean") {
    for (double a : {-0.5, 0.0, 1.0}) {
        const LaguerreExpansion f(a, {0.2, 1.0, -0.5, 0.3, 0.1});
        double prev = 0.0;
        for (double p : {1.0, 2.0, 4.0, 6.0}) {
            const double m = probability_mean(f, p);
            CHECK(m >= prev * (1.0 - 1e-12));
            prev = m;
        }
        double sq = 0.0;
        for (double c : f.coeffs())
            sq += c * c;
        CHECK(probability_mean(f, 2.0) == doctest::Approx(std::sqrt(sq)).epsilon(1e-9));
    }
}

TEST_CASE("rule doubling is self-consistent") {
    const LaguerreExpansion f = LaguerreExpansion::basis(0.5, 30);
    const double a = lp_norm(f, 6.0, BetaMode::beta_alpha);
    const double b = lp_norm(f, 6.0, BetaMode::beta_alpha, 400);
    CHECK(a == doctest::Approx(b).epsilon(1e-7));
}

TEST_CASE("line fit and correlation") {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{3, 5, 7, 9, 11};
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(fit.slope_stderr == doctest::Approx(0.0).scale(1.0));
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
    const std::vector<double> z{5, 4, 3, 2, 1};
    CHECK(pearson_correlation(x, z) == doctest::Approx(-1.0));
}

TEST_CASE("norm growth exponents") {
    CHECK(norm_growth_exponent(0.0, kInfinity, BetaMode::beta_alpha) == 0.0);
    CHECK(norm_growth_exponent(1.0, 4.0, BetaMode::beta_alpha) == doctest::Approx(0.0));
    CHECK(norm_growth_exponent(0.0, 6.0, BetaMode::beta_p_alpha_over_2) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("norm growth on the classical basis") {
    const SobolevBasisCache c = build_stagewise(SobolevProduct(0.0, {}), 200);
    const std::vector<int> grid{25, 50, 75, 100, 125, 150, 175, 200};
    const GrowthReport sup = norm_growth(c, kInfinity, BetaMode::beta_alpha, grid);
    CHECK(std::abs(sup.loglog.slope) <= 0.1);
    const GrowthReport six = norm_growth(c, 6.0, BetaMode::beta_p_alpha_over_2, grid);
    CHECK(six.loglog.slope == doctest::Approx(-1.0 / 6.0).epsilon(0.1 * 6.0));
    const GrowthReport q0 = norm_growth(c, 4.0, BetaMode::beta_alpha, grid);
    CHECK(q0.log_case);
    CHECK(q0.log_correlation > 0.99);
}
