#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driverl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (track CSV, memory files, corpus files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// MPC parameter map rejected by the schema (unknown key or range rule).
class InvalidParameterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Precondition of the dynamics violated during integration.
class SimulationFault : public Error {
 public:
  using Error::Error;
};

/// The controller could not produce an input.
class SolverFault : public Error {
 public:
  using Error::Error;
};

/// Rollout protocol violation; `code` is the machine-readable error code.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& what)
      : Error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A policy endpoint failed (unreachable, bad reply).
class PolicyError : public Error {
 public:
  using Error::Error;
};

}  // namespace driverl
