#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coedit {

/// Invalid argument or violated type invariant.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ownership requested for an allocation with zero total contribution.
class UndefinedOwnershipError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation was called outside the regime it is defined for
/// (e.g. the spectral route on a game with infeasible contributors).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Best response requested while every opponent contributes nothing.
class DegenerateOpponentsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

/// Malformed corpus or CSV input. `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Revision order inconsistent with timestamps, or duplicate revision ids.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistic undefined for the given data (zero variance, singular design).
class StatisticsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace coedit
