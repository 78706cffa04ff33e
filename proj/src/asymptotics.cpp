#include "lsobolev/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsobolev/errors.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

double bessel_entire(double alpha, int j, double x) {
    const double nu = alpha + 2.0 * j;
    if (!(nu > -1.0) || j < 0)
        throw DomainError("bessel_entire requires j >= 0 and alpha + 2j > -1");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("bessel_entire requires finite x >= 0");
    if (x == 0.0)
        return j == 0 ? std::exp(-log_gamma(nu + 1.0)) : 0.0;

    // term_m = (-1)^m x^{j+m} / (m! Gamma(nu+m+1)); ratio term_{m+1}/term_m = -x / ((m+1)(nu+m+1)).
    long double term = std::exp(j * std::log(x) - log_gamma(nu + 1.0));
    long double sum = term;
    long double peak = std::abs(term);
    const double turn = std::sqrt(x);
    for (int m = 0; m < 100000; ++m) {
        term *= -static_cast<long double>(x) / ((m + 1.0L) * (nu + m + 1.0L));
        sum += term;
        peak = std::max(peak, std::abs(term));
        if (m + 1 > turn && std::abs(term) < 1e-17L * peak)
            break;
    }
    return static_cast<double>(sum);
}

BesselLikeProfile::BesselLikeProfile(double alpha, std::vector<double> b_limits)
    : alpha_(alpha), b_(std::move(b_limits)) {
    if (!(alpha > -1.0))
        throw DomainError("BesselLikeProfile requires alpha > -1");
    for (std::size_t j = 0; j < b_.size(); ++j)
        scale_.push_back(std::exp(0.5 * log_gamma(alpha + 2.0 * static_cast<double>(j) + 1.0)));
}

double BesselLikeProfile::operator()(double x) const {
    CompensatedSum acc;
    for (std::size_t j = 0; j < b_.size(); ++j)
        if (b_[j] != 0.0)
            acc.add(b_[j] * scale_[j] * bessel_entire(alpha_, static_cast<int>(j), x));
    return acc.value();
}

std::vector<double> uniform_grid(double x_max, int points) {
    if (points < 2 || !(x_max > 0.0))
        throw DomainError("uniform_grid needs at least two points on a nonempty interval");
    std::vector<double> xs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        xs[static_cast<std::size_t>(i)] = x_max * i / (points - 1);
    return xs;
}

std::vector<double> mh_profile_laguerre(double alpha, int n, int k_shift, std::span<const double> xs) {
    if (n < 1 || k_shift < 0)
        throw DomainError("mh_profile_laguerre requires n >= 1 and k_shift >= 0");
    const LaguerreExpansion ln = LaguerreExpansion::basis(alpha, n);
    const double scale = std::pow(static_cast<double>(n), -0.5 * alpha);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(eval_expansion(ln, x / (n + k_shift)) * scale);
    return out;
}

std::vector<double> mh_profile_sobolev(const SobolevBasisCache& cache, int n, std::span<const double> xs) {
    if (n < 1)
        throw DomainError("mh_profile_sobolev requires n >= 1");
    const LaguerreExpansion& q = cache.q(n);
    const double scale = std::pow(static_cast<double>(n), -0.5 * cache.alpha());
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(eval_expansion(q, x / n) * scale);
    return out;
}

bool LimitDiagnosis::nonzero(double factor) const { return std::abs(estimate) > factor * residual; }

LimitDiagnosis limit_diagnose(std::span<const std::pair<double, double>> seq, double rate) {
    if (!(rate > 0.0))
        throw DomainError("limit_diagnose needs a positive rate");
    if (seq.size() < 4)
        throw DomainError("limit_diagnose needs at least four points");
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(seq[i].first > seq[i - 1].first) || !(seq[i - 1].first > 0.0))
            throw DomainError("limit_diagnose needs strictly increasing positive n");
    auto three_point_at = [&](std::size_t end) {
        const double h1 = std::pow(seq[end - 2].first, -rate);
        const double h2 = std::pow(seq[end - 1].first, -rate);
        const double h3 = std::pow(seq[end].first, -rate);
        const double v1 = seq[end - 2].second, v2 = seq[end - 1].second, v3 = seq[end].second;
        // v = L + c h + d h^2, Lagrange interpolation evaluated at h = 0.
        return v1 * (h2 * h3) / ((h1 - h2) * (h1 - h3)) + v2 * (h1 * h3) / ((h2 - h1) * (h2 - h3)) +
               v3 * (h1 * h2) / ((h3 - h1) * (h3 - h2));
    };
    const std::size_t last = seq.size() - 1;
    const double estimate = three_point_at(last);

    LimitDiagnosis out;
    out.estimate = estimate;
    // Spread between the newest window and the one before it.
    out.residual = std::abs(estimate - three_point_at(last - 1));
    const double e1 = std::abs(seq[last - 2].second - estimate);
    const double e2 = std::abs(seq[last - 1].second - estimate);
    const double e3 = std::abs(seq[last].second - estimate);
    out.trend_ok = e1 > e2 && e2 > e3;
    return out;
}

double connection_rate(double alpha) { return std::min(1.0, alpha + 1.0); }

std::vector<LimitDiagnosis> connection_limits(const SobolevBasisCache& cache, std::span<const int> degrees) {
    const int count = cache.product().N() + 2;
    std::vector<LimitDiagnosis> out;
    for (int j = 0; j < count; ++j) {
        std::vector<std::pair<double, double>> seq;
        for (int n : degrees)
            seq.emplace_back(n, cache.entry(n).b.at(static_cast<std::size_t>(j)));
        out.push_back(limit_diagnose(seq, connection_rate(cache.alpha())));
    }
    return out;
}

int count_sign_changes(std::span<const double> values) {
    int changes = 0;
    double prev = 0.0;
    for (double v : values) {
        if (v == 0.0)
            continue;
        if (prev != 0.0 && (v > 0.0) != (prev > 0.0))
            ++changes;
        prev = v;
    }
    return changes;
}

double sup_abs_deviation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DomainError("sup_abs_deviation: length mismatch");
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

} // namespace lsobolev
