#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfree {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a byte offset into the source,
/// equal to the source length when the problem is premature end of input.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::string expected, std::string found);

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::size_t position_;
    std::string expected_;
    std::string found_;
};

/// Numerical evaluation failure: unbound coordinate, division by zero,
/// zero raised to a negative power.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Objects built over different charts, or with incompatible sizes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A point that lies outside the sampling box of its chart.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Target dimension q is below the critical dimension of the requested
/// predicate (k for immersions, k + s_k for free maps), so the predicate is
/// empty rather than false.
class BelowCriticalDimension : public Error {
public:
    BelowCriticalDimension(std::size_t target_dim, std::size_t critical_dim);

    std::size_t target_dim() const noexcept { return target_dim_; }
    std::size_t critical_dim() const noexcept { return critical_dim_; }

private:
    std::size_t target_dim_;
    std::size_t critical_dim_;
};

/// Matrix entries that are NaN or infinite.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

}  // namespace hfree
