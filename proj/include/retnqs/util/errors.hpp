#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retnqs {

/// Tensor extents or configuration lengths that do not agree.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid user-supplied configuration (architecture, schedules, system).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// API misuse, e.g. asking for gradients of an inference-only trace.
class UsageError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Non-finite values, failed convergence and similar runtime failures.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number (0 when unknown).
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string const& what, std::size_t line)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what)
        , line_{line}
    {}

    auto line() const noexcept -> std::size_t { return line_; }

  private:
    std::size_t line_;
};

} // namespace retnqs
