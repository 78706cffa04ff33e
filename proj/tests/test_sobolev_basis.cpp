#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsobolev/errors.hpp"
#include "lsobolev/laguerre.hpp"
#include "lsobolev/sobolev_basis.hpp"

using namespace lsobolev;

namespace {

// Gram-Schmidt in long double on the monic-like basis {l_k}, using the Gram
// matrix I + sum_j M_j d_j d_j^T written out entry by entry.
std::vector<std::vector<long double>> gram_schmidt(double alpha, const std::vector<double>& masses, int n_max) {
    const int m = n_max + 1;
    std::vector<std::vector<long double>> d(masses.size(), std::vector<long double>(m));
    for (std::size_t j = 0; j < masses.size(); ++j)
        for (int i = 0; i < m; ++i)
            d[j][i] = orthonormal_deriv_at_zero(alpha, i, static_cast<int>(j));
    auto G = [&](int a, int b) {
        long double g = a == b ? 1.0L : 0.0L;
        for (std::size_t j = 0; j < masses.size(); ++j)
            g += masses[j] * d[j][a] * d[j][b];
        return g;
    };
    auto inner = [&](const std::vector<long double>& u, const std::vector<long double>& v) {
        long double s = 0.0L;
        for (int a = 0; a < m; ++a)
            if (u[a] != 0.0L)
                for (int b = 0; b < m; ++b)
                    s += u[a] * G(a, b) * v[b];
        return s;
    };
    std::vector<std::vector<long double>> q;
    for (int n = 0; n < m; ++n) {
        std::vector<long double> v(m, 0.0L);
        v[n] = 1.0L;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& prev : q) {
                const long double c = inner(v, prev);
                for (int a = 0; a < m; ++a)
                    v[a] -= c * prev[a];
            }
        const long double nrm = std::sqrt(inner(v, v));
        for (auto& x : v)
            x /= nrm;
        q.push_back(v);
    }
    return q;
}

} // namespace

TEST_CASE("sobolev_inner examples") {
    const SobolevProduct S(0.0, {1.0});
    const LaguerreExpansion one = LaguerreExpansion::basis(0.0, 0);
    CHECK(sobolev_inner(one, one, S) == doctest::Approx(2.0));
    const LaguerreExpansion l1 = LaguerreExpansion::basis(0.0, 1), l2 = LaguerreExpansion::basis(0.0, 2);
    CHECK(sobolev_inner(l1, l2, S) == doctest::Approx(1.0 * eval_expansion(l1, 0.0) * eval_expansion(l2, 0.0)));
    const SobolevProduct plain(0.5, {0.0, 0.0});
    const LaguerreExpansion f(0.5, {1.0, 2.0, -1.0}), g(0.5, {0.5, -1.0, 3.0});
    CHECK(sobolev_inner(f, g, plain) == doctest::Approx(0.5 - 2.0 - 3.0));
}

TEST_CASE("product domain") {
    CHECK_THROWS_AS(SobolevProduct(-1.0, {}), DomainError);
    CHECK_THROWS_AS(SobolevProduct(0.0, {1.0, -0.5}), DomainError);
    const SobolevProduct S(0.0, {1.0, 0.0, 2.0});
    CHECK(S.N() == 2);
    CHECK(S.positive_indices() == std::vector<int>{0, 2});
    CHECK(SobolevProduct(0.0, {}).N() == -1);
}

TEST_CASE("classical case reproduces l_n exactly") {
    const SobolevBasisCache c = build_stagewise(SobolevProduct(0.5, {}), 40);
    for (int n = 0; n <= 40; ++n)
        for (int k = 0; k <= 40; ++k)
            CHECK(c.q(n)[k] == (k == n ? 1.0 : 0.0));
}

TEST_CASE("Q_1 for a single mass at alpha = 0") {
    for (double M : {1.0, 0.25, 3.0}) {
        const SobolevProduct S(0.0, {M});
        for (const SobolevBasisCache& c : {build_stagewise(S, 3), build_gram_oracle(S, 3)}) {
            const LaguerreExpansion Q1 = c.Q(1);
            // 1/(1+M) - x, with x = 1 - l_1 for alpha = 0 (l_1 = 1 - x).
            CHECK(eval_expansion(Q1, 0.0) == doctest::Approx(1.0 / (1.0 + M)));
            CHECK(eval_expansion(Q1, 2.0) == doctest::Approx(1.0 / (1.0 + M) - 2.0));
            CHECK(sobolev_inner(Q1, LaguerreExpansion::basis(0.0, 0), S) == doctest::Approx(0.0).scale(1.0));
        }
    }
}

TEST_CASE("orthogonality example") {
    const SobolevProduct S(0.0, {1.0, 1.0});
    const SobolevBasisCache c = build_stagewise(S, 8);
    CHECK(std::abs(sobolev_inner(c.q(5), c.q(3), S)) <= 1e-10);
}

TEST_CASE("stagewise and oracle against long double Gram-Schmidt") {
    for (double alpha : {-0.5, 0.0, 1.0}) {
        const std::vector<double> masses{0.5, 0.0, 2.0};
        const int n_max = 14;
        const auto ref = gram_schmidt(alpha, masses, n_max);
        const SobolevProduct S(alpha, masses);
        const SobolevBasisCache a = build_stagewise(S, n_max), b = build_gram_oracle(S, n_max);
        for (int n = 0; n <= n_max; ++n) {
            const double sign = ref[n][n] < 0 ? -1.0 : 1.0;
            for (int k = 0; k <= n; ++k) {
                const double r = sign * static_cast<double>(ref[n][k]);
                CHECK(a.q(n)[k] == doctest::Approx(r).epsilon(1e-9).scale(1.0));
                CHECK(b.q(n)[k] == doctest::Approx(r).epsilon(1e-9).scale(1.0));
            }
        }
    }
}

TEST_CASE("orthonormality with stored derivatives") {
    const SobolevProduct S(0.5, {1.0, 0.0, 1.0});
    const SobolevBasisCache c = build_stagewise(S, 100);
    double worst = 0.0;
    for (int i = 0; i <= 100; i += 7)
        for (int j = i; j <= 100; j += 7) {
            double s = 0.0;
            const auto& qi = c.q(i);
            const auto& qj = c.q(j);
            for (std::size_t k = 0; k < std::min(qi.size(), qj.size()); ++k)
                s += qi[k] * qj[k];
            for (int m = 0; m <= S.N(); ++m)
                s += S.mass(m) * c.entry(i).derivs_at_zero[m] * c.entry(j).derivs_at_zero[m];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    CHECK(worst <= 1e-9);
}

TEST_CASE("stored derivatives match the expansion where it is well conditioned") {
    const SobolevBasisCache c = build_stagewise(SobolevProduct(0.0, {1.0, 1.0}), 20);
    for (int n = 0; n <= 20; ++n)
        for (int k = 0; k <= 2; ++k)
            CHECK(c.entry(n).derivs_at_zero[k] ==
                  doctest::Approx(expansion_deriv_zero(c.q(n), k)).epsilon(1e-7).scale(1e-6));
}

TEST_CASE("connection coefficients") {
    const SobolevBasisCache plain = build_stagewise(SobolevProduct(0.0, {0.0, 0.0}), 30);
    const auto b = connection_coeffs(plain, 30);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(b[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(b[2] == doctest::Approx(0.0).scale(1.0));

    const SobolevBasisCache c = build_stagewise(SobolevProduct(0.5, {1.0, 0.0, 1.0}), 120);
    for (int n : {3, 40, 120}) {
        const auto bn = connection_coeffs(c, n);
        CHECK(representation_residual(c, n, bn) <= 1e-8);
    }
}

TEST_CASE("derivative ratio is one in the classical case") {
    const SobolevBasisCache c = build_stagewise(SobolevProduct(1.0, {0.0, 0.0}), 30);
    for (int n = 2; n <= 30; n += 7)
        for (int k = 0; k <= 1; ++k)
            CHECK(q_deriv_ratio(c, k, n) == doctest::Approx(1.0));
}

TEST_CASE("serialization round trip") {
    const SobolevBasisCache c = build_stagewise(SobolevProduct(0.5, {1.0, 0.0, 2.0}), 25);
    const SobolevBasisCache d = deserialize_cache(serialize_cache(c));
    CHECK(d.alpha() == c.alpha());
    CHECK(d.n_max() == c.n_max());
    for (int n = 0; n <= 25; ++n) {
        REQUIRE(d.q(n).size() == c.q(n).size());
        for (std::size_t k = 0; k < c.q(n).size(); ++k)
            CHECK(d.q(n)[k] == c.q(n)[k]);
        CHECK(d.entry(n).sobolev_norm_sq_Q == c.entry(n).sobolev_norm_sq_Q);
        CHECK(d.entry(n).b == c.entry(n).b);
        CHECK(d.entry(n).derivs_at_zero == c.entry(n).derivs_at_zero);
    }
    CHECK_THROWS(deserialize_cache("{\"format\": \"something else\"}"));
}
