#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bqmc {

/// A method/contract/dimension combination the engines do not support.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky pivot fell below tolerance at `index()` (rank deficiency).
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Malformed experiment configuration; carries the offending line and key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::string field, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + message),
          line_(line), field_(std::move(field)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

}  // namespace bqmc
