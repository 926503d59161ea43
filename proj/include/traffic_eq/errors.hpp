#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace traffic_eq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad ids, nonpositive times, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnreachableDemand : public Error {
 public:
  UnreachableDemand(std::size_t origin, std::size_t destination)
      : Error("destination " + std::to_string(destination) +
              " is unreachable from origin " + std::to_string(origin)),
        origin_(origin),
        destination_(destination) {}

  std::size_t origin() const noexcept { return origin_; }
  std::size_t destination() const noexcept { return destination_; }

 private:
  std::size_t origin_;
  std::size_t destination_;
};

/// A link time below its free-flow time was passed where t >= t_free is required.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The primal flow does not route the demand, or violates capacities (SD).
class InfeasiblePrimal : public Error {
 public:
  using Error::Error;
};

class AnchorNotStrictlyFeasible : public Error {
 public:
  using Error::Error;
};

class AnchorSearchFailed : public Error {
 public:
  using Error::Error;
};

/// Method not applicable to the chosen model (Frank-Wolfe on stable dynamics).
class ModelMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class TotalMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace traffic_eq
