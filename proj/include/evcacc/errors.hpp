#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace evcacc {

// Invalid configuration or argument (bad dt, non-positive headway, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string field = {})
        : std::runtime_error(what), field_(std::move(field)) {}

    // Dotted path of the offending field, empty when not field-specific.
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Precondition on a mathematical domain violated (empty series, zero norm,
// failing gain conditions where a bound is requested, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-finite value encountered while integrating.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, std::size_t step = npos)
        : std::runtime_error(what), step_(step) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Parameter estimation failed to converge inside the search bracket.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace evcacc
