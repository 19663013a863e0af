#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bulksurf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateGradient : public Error {
public:
  using Error::Error;
};

/// An iterative procedure (level-set projection or Krylov solve) ran out of iterations.
class NoConvergence : public Error {
public:
  using Error::Error;
};

class NonFiniteBreakdown : public Error {
public:
  using Error::Error;
};

class MeshGenFailure : public Error {
public:
  using Error::Error;
};

class MeshFormatError : public Error {
public:
  using Error::Error;
};

class InvalidMesh : public Error {
public:
  using Error::Error;
};

class TangledMesh : public Error {
public:
  using Error::Error;
};

class DegenerateSimplex : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class UnknownPreset : public Error {
public:
  using Error::Error;
};

class InvalidParameter : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Configuration problems; the CLI maps these to exit code 1.
class ConfigError : public Error {
public:
  using Error::Error;
};

class ParseError : public ConfigError {
public:
  ParseError(std::size_t line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public ConfigError {
public:
  ValidationError(const std::string& field, const std::string& what)
      : ConfigError(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class ConflictError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Wraps the first failure of a time loop together with the step that failed.
class StepFailure : public Error {
public:
  StepFailure(std::size_t step, const std::string& cause)
      : Error("step " + std::to_string(step) + ": " + cause), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

}  // namespace bulksurf
