#include "lsobolev/laguerre.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lsobolev/errors.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

namespace {

constexpr double kRescaleAt = 1e150;
constexpr double kRescaleBy = 1e-150;
const double kLogRescale = 150.0 * std::log(10.0);

void check_alpha(double alpha) {
    if (!(alpha > -1.0) || !std::isfinite(alpha))
        throw DomainError("Laguerre parameter must satisfy alpha > -1, got " + std::to_string(alpha));
}

void check_degree(int n) {
    if (n < 0)
        throw DomainError("Laguerre degree must be nonnegative, got " + std::to_string(n));
}

// Orthonormal recurrence x l_k = -a_{k+1} l_{k+1} + b_k l_k - a_k l_{k-1}.
double rec_a(double alpha, int k) { return std::sqrt(k * (k + alpha)); }
double rec_b(double alpha, int k) { return 2.0 * k + alpha + 1.0; }

// ln prod_{i=1}^{m} (1 + shift / i) = ln C(m + shift, m).
double log_rising_ratio(double shift, int m) {
    CompensatedSum acc;
    for (int i = 1; i <= m; ++i)
        acc.add(std::log1p(shift / i));
    return acc.value();
}

// Yields ln|(l_i^alpha)^{(k)}(0)| for i = k, k+1, ... in O(1) per step.
class OrthonormalDerivLogs {
public:
    OrthonormalDerivLogs(double alpha, int k) : alpha_(alpha), k_(k), i_(k) {
        for (int t = 1; t <= k; ++t)
            log_norm_.add(std::log1p(alpha / t));
    }
    int index() const { return i_; }
    double value() const { return log_binom_.value() - 0.5 * log_norm_.value(); }
    void advance() {
        ++i_;
        log_binom_.add(std::log1p((alpha_ + k_) / (i_ - k_)));
        log_norm_.add(std::log1p(alpha_ / i_));
    }

private:
    double alpha_;
    int k_;
    int i_;
    CompensatedSum log_binom_;
    CompensatedSum log_norm_;
};

} // namespace

LaguerreParam::LaguerreParam(double alpha) : alpha_(alpha) { check_alpha(alpha); }

LaguerreExpansion::LaguerreExpansion(double alpha, std::vector<double> coeffs)
    : alpha_(alpha), coeffs_(std::move(coeffs)) {
    check_alpha(alpha);
}

LaguerreExpansion LaguerreExpansion::basis(double alpha, int n) {
    check_degree(n);
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    return {alpha, std::move(c)};
}

int LaguerreExpansion::degree() const {
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        if (coeffs_[k] != 0.0)
            return static_cast<int>(k);
    return -1;
}

double ScaledValue::value() const { return mantissa * std::exp(log_scale); }

double ScaledValue::log_abs() const {
    if (mantissa == 0.0)
        return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa)) + log_scale;
}

double eval_L(double alpha, int n, double x) {
    check_alpha(alpha);
    check_degree(n);
    double prev = 0.0;
    double cur = 1.0;
    for (int k = 0; k < n; ++k) {
        const double next = ((2.0 * k + alpha + 1.0 - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double log_abs_deriv_at_zero(double alpha, int n, int k) {
    check_alpha(alpha);
    check_degree(n);
    if (k < 0 || k > n)
        throw DomainError("log_abs_deriv_at_zero requires 0 <= k <= n");
    return log_rising_ratio(alpha + k, n - k);
}

double deriv_at_zero(double alpha, int n, int k) {
    check_alpha(alpha);
    check_degree(n);
    if (k < 0)
        throw DomainError("derivative order must be nonnegative");
    if (k > n)
        return 0.0;
    const double mag = std::exp(log_abs_deriv_at_zero(alpha, n, k));
    return (k % 2 == 0) ? mag : -mag;
}

double log_norm_sq_L(double alpha, int n) {
    check_alpha(alpha);
    check_degree(n);
    return log_rising_ratio(alpha, n);
}

double norm_sq_L(double alpha, int n) { return std::exp(log_norm_sq_L(alpha, n)); }

double orthonormal_deriv_at_zero(double alpha, int n, int k) {
    check_alpha(alpha);
    check_degree(n);
    if (k < 0)
        throw DomainError("derivative order must be nonnegative");
    if (k > n)
        return 0.0;
    const double mag = std::exp(log_abs_deriv_at_zero(alpha, n, k) - 0.5 * log_norm_sq_L(alpha, n));
    return (k % 2 == 0) ? mag : -mag;
}

std::vector<double> orthonormal_deriv_column(double alpha, int n_max, int k) {
    check_degree(n_max);
    check_alpha(alpha);
    if (k < 0)
        throw DomainError("derivative order must be nonnegative");
    std::vector<double> col(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (OrthonormalDerivLogs it(alpha, k); it.index() <= n_max; it.advance())
        col[static_cast<std::size_t>(it.index())] = sign * std::exp(it.value());
    return col;
}

double kernel_deriv_zero(double alpha, int n, int k, int h) {
    check_alpha(alpha);
    check_degree(n);
    if (k < 0 || h < 0)
        throw DomainError("derivative orders must be nonnegative");
    CompensatedSum acc;
    for (int i = std::max(k, h); i <= n; ++i) {
        const double log_term =
            (log_abs_deriv_at_zero(alpha, i, k) + log_abs_deriv_at_zero(alpha, i, h)) - log_norm_sq_L(alpha, i);
        const double term = std::exp(log_term);
        acc.add(((k + h) % 2 == 0) ? term : -term);
    }
    return acc.value();
}

LaguerreExpansion kernel_expansion(double alpha, int n, int h) {
    return {alpha, orthonormal_deriv_column(alpha, n, h)};
}

double eval_expansion(const LaguerreExpansion& f, double x) {
    const double alpha = f.alpha();
    const int deg = f.degree();
    if (deg < 0)
        return 0.0;
    // y_k = c_k + A_k(x) y_{k+1} + B_{k+1} y_{k+2}, with l_{k+1} = A_k l_k + B_k l_{k-1}.
    double y1 = 0.0;
    double y2 = 0.0;
    for (int k = deg; k >= 0; --k) {
        const double a_next = rec_a(alpha, k + 1);
        const double A = (rec_b(alpha, k) - x) / a_next;
        const double B_next = -rec_a(alpha, k + 1) / rec_a(alpha, k + 2);
        const double y = f[static_cast<std::size_t>(k)] + A * y1 + B_next * y2;
        y2 = y1;
        y1 = y;
    }
    return y1;
}

ScaledValue eval_expansion_scaled(const LaguerreExpansion& f, double x) {
    const double alpha = f.alpha();
    const int deg = f.degree();
    if (deg < 0)
        return {};
    double prev = 0.0;
    double cur = 1.0;
    double sum = f[0];
    double log_scale = 0.0;
    for (int k = 0; k < deg; ++k) {
        const double next = ((rec_b(alpha, k) - x) * cur - rec_a(alpha, k) * prev) / rec_a(alpha, k + 1);
        prev = cur;
        cur = next;
        sum += f[static_cast<std::size_t>(k) + 1] * cur;
        if (std::abs(cur) > kRescaleAt) {
            prev *= kRescaleBy;
            cur *= kRescaleBy;
            sum *= kRescaleBy;
            log_scale += kLogRescale;
        }
    }
    return {sum, log_scale};
}

double eval_weighted(const LaguerreExpansion& f, double x) {
    const ScaledValue v = eval_expansion_scaled(f, x);
    if (v.mantissa == 0.0)
        return 0.0;
    return v.mantissa * std::exp(v.log_scale - 0.5 * x);
}

double expansion_deriv_zero(const LaguerreExpansion& f, int k) {
    if (k < 0)
        throw DomainError("derivative order must be nonnegative");
    const int deg = f.degree();
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    CompensatedSum acc;
    for (OrthonormalDerivLogs it(f.alpha(), k); it.index() <= deg; it.advance()) {
        const double c = f[static_cast<std::size_t>(it.index())];
        if (c != 0.0)
            acc.add(c * sign * std::exp(it.value()));
    }
    return acc.value();
}

double log_christoffel_sum(double alpha, int m, double x) {
    check_alpha(alpha);
    if (m < 1)
        throw DomainError("log_christoffel_sum requires m >= 1");
    double prev = 0.0;
    double cur = 1.0;
    double sumsq = 1.0;
    double log_scale = 0.0; // applies to sumsq; values carry half of it
    for (int k = 0; k + 1 < m; ++k) {
        const double next = ((rec_b(alpha, k) - x) * cur - rec_a(alpha, k) * prev) / rec_a(alpha, k + 1);
        prev = cur;
        cur = next;
        sumsq += cur * cur;
        if (std::abs(cur) > kRescaleAt) {
            prev *= kRescaleBy;
            cur *= kRescaleBy;
            sumsq *= kRescaleBy * kRescaleBy;
            log_scale += 2.0 * kLogRescale;
        }
    }
    return std::log(sumsq) + log_scale;
}

} // namespace lsobolev
