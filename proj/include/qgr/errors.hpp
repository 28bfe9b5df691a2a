// Error types shared by all qgr modules.
#pragma once

#include <stdexcept>
#include <string>

namespace qgr {

enum class ErrorCode {
  // model construction
  invalid_degree,
  invalid_weight,
  not_self_adjoint,
  conversion_failure,
  not_unitary,
  invalid_graph,
  invalid_mixer,
  unsupported_coupling,
  invalid_example,
  // symbolic engine
  too_large_for_symbolic,
  degenerate_secular_function,
  degenerate_normalization,
  basis_mismatch,
  irrational_length,
  // numerics
  pole_proximity,
  criterion_inconclusive,
  contour_unresolved,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse errors carry a source position (1-based line/column).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qgr
