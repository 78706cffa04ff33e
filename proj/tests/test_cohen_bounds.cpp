#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsobolev/cohen_bounds.hpp"
#include "lsobolev/errors.hpp"
#include "lsobolev/quadrature.hpp"
#include "lsobolev/special.hpp"

using namespace lsobolev;

namespace {

// <g, l_k> by an exact Gauss rule on the closed form x^j [L_n^{a+j} - s L_{n+2}^{a+j}].
double projected_coeff(double a, int n, int j, int k) {
    const double g1 = a + j;
    const double s = std::sqrt((n + 1.0) * (n + 2.0) / ((n + g1 + 1.0) * (n + g1 + 2.0)));
    const int m = (n + j + 2 + k) / 2 + 2;
    const QuadratureRule r = build_quadrature(a, m);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = r.nodes[i];
        const double g = std::pow(x, j) * (eval_L(g1, n, x) - s * eval_L(g1, n + 2, x));
        sum += r.weights[i] * g * eval_L(a, k, x) / std::sqrt(norm_sq_L(a, k));
    }
    return sum / std::tgamma(a + 1.0);
}

} // namespace

TEST_CASE("test function expansion against quadrature projection") {
    for (double a : {-0.5, 0.0, 1.0}) {
        const SobolevProduct S(a, {1.0, 0.0, 1.0});
        const int n = 9, j = 3;
        const TestFunction g = build_test_function(a, S, n, j);
        for (int k = 0; k <= n + j + 6; ++k) {
            const double ref = projected_coeff(a, n, j, k);
            CHECK(std::abs(g.expansion[k] - ref) <= 1e-9 * std::abs(g.expansion[n]));
            if (k < n || k > n + j + 2)
                CHECK(g.expansion[k] == 0.0); // exact zeros, the projection only approximates them
        }
        CHECK(g.expansion[n] == doctest::Approx(a0j(a, n, j) * std::sqrt(norm_sq_L(a, n))).epsilon(1e-12));
    }
}

TEST_CASE("test function derivatives vanish at the origin") {
    const SobolevProduct S(0.5, {0.5, 0.0, 0.0, 2.0});
    const TestFunction g = build_test_function(0.5, S, 40, 4);
    for (int i = 0; i <= 3; ++i) {
        CHECK(relative_deriv_at_zero(g.expansion, i) <= 1e-9);
        CHECK(test_function_deriv_at_zero(g, i) == 0.0);
    }
    CHECK(test_function_deriv_at_zero(g, 4) != 0.0);
    CHECK_THROWS_AS(build_test_function(0.5, S, 40, 3), DomainError);
}

TEST_CASE("a0j and test index") {
    CHECK(a0j(0.0, 3, 2) == doctest::Approx(20.0)); // Gamma(6)/Gamma(4)
    CHECK(a0j(0.5, 5, 0) == 1.0);
    const SobolevProduct none(0.0, {});
    CHECK(choose_test_index(0.0, none, kInfinity) == 0);
    CHECK(choose_test_index(3.0, none, kInfinity) == 3);  // j > 2.5
    CHECK(choose_test_index(3.0, none, 8.0) == 2);        // j > 2.5 - 1 = 1.5
    const SobolevProduct two(0.0, {1.0, 1.0});
    CHECK(choose_test_index(0.0, two, kInfinity) == 2);
}

TEST_CASE("Fourier coefficients of the basis and of test functions") {
    const SobolevProduct S(0.0, {1.0, 1.0});
    const SobolevBasisCache c = build_stagewise(S, 60);
    for (int m : {0, 3, 20})
        for (int k : {0, 3, 20})
            CHECK(fourier_coeff(c.q(m), k, c) == doctest::Approx(m == k ? 1.0 : 0.0).scale(1.0).epsilon(1e-9));
    const int n = 50, j = 2;
    const TestFunction g = build_test_function(0.0, S, n, j);
    const double ghat = fourier_coeff(g, n, c);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(fourier_coeff(g, k, c)) <= 1e-9 * std::abs(ghat));
    CHECK(test_coeff_closed_form(c, n, j) == doctest::Approx(ghat).epsilon(1e-9));
    CHECK(fourier_coeff(g.expansion, n, c) == doctest::Approx(ghat).epsilon(1e-6));
}

TEST_CASE("apply_T") {
    const SobolevProduct S(0.5, {1.0});
    const SobolevBasisCache c = build_stagewise(S, 30);
    const auto sums = CoefficientFamily::partial_sums();
    // f in the span of q_0..q_5 is reproduced by S_5.
    LaguerreExpansion f(0.5, std::vector<double>(6, 0.0));
    {
        std::vector<double> acc(6, 0.0);
        const double w[] = {0.3, -1.0, 0.5, 0.0, 2.0, 0.1};
        for (int m = 0; m <= 5; ++m)
            for (int k = 0; k <= m; ++k)
                acc[k] += w[m] * c.q(m)[k];
        f = LaguerreExpansion(0.5, acc);
    }
    const LaguerreExpansion Sf = apply_T(f, sums, 5, c);
    for (int k = 0; k <= 5; ++k)
        CHECK(Sf[k] == doctest::Approx(f[k]).epsilon(1e-10).scale(1.0));

    // T_n g = c_{n,n} g^(n) q_n.
    const CoefficientFamily half([](int k, int n) { return 1.0 / (1.0 + k + n); }, "half");
    const int n = 20;
    const TestFunction g = build_test_function(0.5, S, n, 1);
    const LaguerreExpansion Tg = apply_T(g.expansion, half, n, c);
    const double scale = half(n, n) * fourier_coeff(g, n, c);
    for (int k = 0; k <= n; ++k)
        CHECK(std::abs(Tg[k] - scale * c.q(n)[k]) <= 1e-6 * std::abs(scale));

    // n = 0 gives f^(0) q_0.
    const LaguerreExpansion T0 = apply_T(f, sums, 0, c);
    CHECK(T0[0] == doctest::Approx(fourier_coeff(f, 0, c) * c.q(0)[0]));
}

TEST_CASE("Cohen bound is realized by its witness") {
    const SobolevProduct S(0.0, {1.0});
    const SobolevBasisCache c = build_stagewise(S, 80);
    const auto sums = CoefficientFamily::partial_sums();
    for (double p : {8.0, kInfinity}) {
        const CohenBound b = cohen_lower_bound(60, -1, p, BetaMode::beta_alpha, sums, c);
        CHECK(b.j == choose_test_index(0.0, S, p));
        const TestFunction g = build_test_function(0.0, S, 60, b.j);
        const LaguerreExpansion Tg = apply_T(g.expansion, sums, 60, c);
        const double rq = lp_norm(Tg, p, BetaMode::beta_alpha) / sobolev_space_norm(g.expansion, p, BetaMode::beta_alpha, S);
        CHECK(rq == doctest::Approx(b.bound).epsilon(1e-6));
        CHECK(b.g_hat_n_inner == doctest::Approx(b.g_hat_n).epsilon(1e-9));
    }
}

TEST_CASE("Cohen exponents and Pollard regions") {
    CHECK(cohen_exponent(0.0, kInfinity, BetaMode::beta_alpha) == doctest::Approx(0.5));
    CHECK(cohen_exponent(0.0, 8.0, BetaMode::beta_p_alpha_over_2) == doctest::Approx(0.25));
    CHECK(cohen_exponent(1.0, 8.0, BetaMode::beta_alpha) == doctest::Approx(1.0));
    CHECK(pollard_region(0.0, 1.0, BetaMode::beta_alpha) == PollardRegion::below_p0);
    CHECK(pollard_region(0.0, 4.0 / 3.0, BetaMode::beta_alpha) == PollardRegion::at_p0);
    CHECK(pollard_region(0.0, 2.0, BetaMode::beta_alpha) == PollardRegion::inside);
    CHECK(pollard_region(0.0, 4.0, BetaMode::beta_alpha) == PollardRegion::at_q0);
    CHECK(pollard_region(0.5, 3.0, BetaMode::beta_alpha) == PollardRegion::at_q0);
    CHECK(pollard_region(0.0, kInfinity, BetaMode::beta_p_alpha_over_2) == PollardRegion::above_q0);
    CHECK(std::string(to_string(PollardRegion::inside)) == "inside");
}
