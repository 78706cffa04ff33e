#pragma once

#include <stdexcept>
#include <string>

namespace lsobolev {

/// Parameter outside the admissible domain (alpha <= -1, negative mass, bad p, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A computation produced a nonfinite value or failed to converge.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lsobolev
