#include "lsobolev/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "lsobolev/errors.hpp"
#include "lsobolev/laguerre.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

TridiagonalSpectrum tridiagonal_eigen(std::vector<double> d, std::vector<double> e) {
    const std::size_t n = d.size();
    if (n == 0)
        return {};
    if (e.size() + 1 != n)
        throw DomainError("tridiagonal_eigen: offdiag must have size n-1");
    e.push_back(0.0);
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    // Implicit QL, carrying only the first row of the eigenvector matrix.
    for (std::size_t l = 0; l < n; ++l) {
        for (int iter = 0;; ++iter) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd)
                    break;
            }
            if (m == l)
                break;
            if (iter == 100)
                throw NumericFailure("tridiagonal_eigen: QL iteration did not converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool deflated = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (deflated)
                continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    TridiagonalSpectrum out;
    out.eigenvalues.reserve(n);
    out.first_component_sq.reserve(n);
    for (std::size_t i : order) {
        out.eigenvalues.push_back(d[i]);
        out.first_component_sq.push_back(z[i] * z[i]);
    }
    return out;
}

namespace {

// p_m(t) / p_m'(t) for the orthonormal polynomial of degree m (weight t^gamma e^{-t}).
double newton_step(double gamma, int m, double t) {
    double p_prev = 0.0, p = 1.0;
    double dp_prev = 0.0, dp = 0.0;
    for (int k = 0; k < m; ++k) {
        const double a_k = std::sqrt(k * (k + gamma));
        const double a_next = std::sqrt((k + 1.0) * (k + 1.0 + gamma));
        const double b_k = 2.0 * k + gamma + 1.0;
        const double p_next = ((b_k - t) * p - a_k * p_prev) / a_next;
        const double dp_next = ((b_k - t) * dp - p - a_k * dp_prev) / a_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        const double scale = std::max(std::abs(p), std::abs(dp));
        if (scale > 1e150) {
            p_prev /= scale;
            p /= scale;
            dp_prev /= scale;
            dp /= scale;
        }
    }
    return p / dp;
}

} // namespace

QuadratureRule build_quadrature(double gamma, int m) {
    if (!(gamma > -1.0) || !std::isfinite(gamma))
        throw DomainError("build_quadrature requires gamma > -1, got " + std::to_string(gamma));
    if (m < 1)
        throw DomainError("build_quadrature requires m >= 1, got " + std::to_string(m));

    std::vector<double> diag(static_cast<std::size_t>(m));
    std::vector<double> off(static_cast<std::size_t>(m) - 1);
    for (int k = 0; k < m; ++k)
        diag[static_cast<std::size_t>(k)] = 2.0 * k + gamma + 1.0;
    for (int k = 1; k < m; ++k)
        off[static_cast<std::size_t>(k) - 1] = std::sqrt(k * (k + gamma));

    const TridiagonalSpectrum spec = tridiagonal_eigen(std::move(diag), std::move(off));

    QuadratureRule rule;
    rule.gamma = gamma;
    rule.exact_degree = 2 * m - 1;
    rule.nodes = spec.eigenvalues;
    for (double& t : rule.nodes) {
        for (int it = 0; it < 3; ++it) {
            const double step = newton_step(gamma, m, t);
            if (!std::isfinite(step))
                break;
            t -= step;
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * t)
                break;
        }
        if (!(t > 0.0) || !std::isfinite(t))
            throw NumericFailure("build_quadrature: node refinement left the half-line");
    }
    for (std::size_t i = 1; i < rule.nodes.size(); ++i)
        if (!(rule.nodes[i] > rule.nodes[i - 1]))
            throw NumericFailure("build_quadrature: nodes not strictly increasing after refinement");

    const double log_mass = log_gamma(gamma + 1.0);
    rule.log_weights.reserve(rule.nodes.size());
    rule.weights.reserve(rule.nodes.size());
    for (double t : rule.nodes) {
        const double lw = log_mass - log_christoffel_sum(gamma, m, t);
        rule.log_weights.push_back(lw);
        rule.weights.push_back(std::exp(lw));
    }
    return rule;
}

std::shared_ptr<const QuadratureRule> cached_quadrature(double gamma, int m) {
    static std::mutex mutex;
    static std::map<std::pair<double, int>, std::shared_ptr<const QuadratureRule>> cache;
    const auto key = std::make_pair(gamma, m);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(build_quadrature(gamma, m));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

} // namespace lsobolev
