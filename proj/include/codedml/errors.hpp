#pragma once

#include <stdexcept>
#include <string>

namespace codedml {

/// Failure categories, each mapped to a process exit code by the CLI.
enum class ErrorKind { Config = 2, Numerical = 3, Infeasible = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Bad input: malformed config, invalid parameters, inconsistent objects.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// A root solve ran out of iterations. Carries the best iterate seen.
class IterationFailure : public NumericalError {
 public:
  IterationFailure(const std::string& what, double best_iterate)
      : NumericalError(what), best_iterate_(best_iterate) {}
  double best_iterate() const noexcept { return best_iterate_; }

 private:
  double best_iterate_;
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

}  // namespace codedml
