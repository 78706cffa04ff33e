#include "lsobolev/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsobolev/errors.hpp"

namespace lsobolev {

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
    // lgamma is reentrant in glibc when the sign output is not requested.
    return std::lgamma(x);
}

double log_binomial(double a, int n) {
    return log_gamma(n + a + 1.0) - log_gamma(n + 1.0) - log_gamma(a + 1.0);
}

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty())
        return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(peak))
        return peak;
    CompensatedSum acc;
    for (double t : terms)
        acc.add(std::exp(t - peak));
    return peak + std::log(acc.value());
}

} // namespace lsobolev
