#pragma once

#include <cmath>
#include <span>

namespace lsobolev {

/// ln Gamma(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// ln C(n + a, n) = ln Gamma(n+a+1) - ln Gamma(n+1) - ln Gamma(a+1).
double log_binomial(double a, int n);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// ln(sum_i exp(terms[i])); -inf for an empty span.
double log_sum_exp(std::span<const double> terms);

} // namespace lsobolev
