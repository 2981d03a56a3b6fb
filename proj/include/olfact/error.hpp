#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace olfact {

enum class ErrorKind {
  parse,
  dimension_mismatch,
  duplicate_id,
  unknown_compound,
  non_finite,
  degenerate_data,
  invalid_config,
  no_convergence,
  io,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the library. The CLI maps `kind()` onto
/// process exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input. `row` and `column` are 1-based positions in the source
/// file (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t row, std::size_t column,
             const std::string& what);

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t row_;
  std::size_t column_;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& m)
      : Error(ErrorKind::dimension_mismatch, m) {}
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& m) : Error(ErrorKind::duplicate_id, m) {}
};

class UnknownCompound : public Error {
 public:
  explicit UnknownCompound(const std::string& m)
      : Error(ErrorKind::unknown_compound, m) {}
};

class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& m) : Error(ErrorKind::non_finite, m) {}
};

class DegenerateData : public Error {
 public:
  explicit DegenerateData(const std::string& m)
      : Error(ErrorKind::degenerate_data, m) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& m)
      : Error(ErrorKind::invalid_config, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};

/// Iteration cap reached before the stopping rule fired.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, long iterations, double kkt_residual);

  long iterations() const noexcept { return iterations_; }
  double kkt_residual() const noexcept { return kkt_residual_; }

 private:
  long iterations_;
  double kkt_residual_;
};

}  // namespace olfact
