#include "olfact/error.hpp"

#include <cstdio>

namespace olfact {

namespace {
std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::duplicate_id: return "DuplicateId";
    case ErrorKind::unknown_compound: return "UnknownCompound";
    case ErrorKind::non_finite: return "NonFinite";
    case ErrorKind::degenerate_data: return "DegenerateData";
    case ErrorKind::invalid_config: return "InvalidConfig";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

namespace {

std::string locate(const std::string& file, std::size_t row, std::size_t column,
                   const std::string& what) {
  std::string out = file;
  if (row > 0) out += ":" + std::to_string(row);
  if (column > 0) out += ":" + std::to_string(column);
  if (!out.empty()) out += ": ";
  return out + what;
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t row, std::size_t column,
                       const std::string& what)
    : Error(ErrorKind::parse, locate(file, row, column, what)),
      file_(file),
      row_(row),
      column_(column) {}

NoConvergence::NoConvergence(const std::string& what, long iterations,
                             double kkt_residual)
    : Error(ErrorKind::no_convergence,
            what + " did not converge after " + std::to_string(iterations) +
                " iterations (kkt residual " + format_g(kkt_residual) + ")"),
      iterations_(iterations),
      kkt_residual_(kkt_residual) {}

}  // namespace olfact
