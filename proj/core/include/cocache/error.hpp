#pragma once

#include <stdexcept>
#include <string>

namespace cocache {

// Base of every exception thrown by the library. The CLI maps the concrete
// subclass onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a mathematical function (e.g. E1(0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bracket endpoints do not straddle a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Iterative method ran out of iterations. Carries the best iterate found.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_iterate)
      : Error(what), best_(best_iterate) {}
  double best_iterate() const noexcept { return best_; }

 private:
  double best_;
};

// Rank-deficient co-user channel matrix during zero-forcing.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration: unknown key, bad type, missing required key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Price or slot parameters violate the conditions the controller relies on.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// NaN or other non-finite state during simulation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace cocache
