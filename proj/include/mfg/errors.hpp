#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Shape or configuration mismatch between model, policy, flow or settings.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A model callback violated its contract (e.g. a transition row that does
// not sum to one).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value produced where a finite one is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input; carries the 1-based line/column of the offending
// character where known.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line_no, int column_no)
      : std::runtime_error(what + " (line " + std::to_string(line_no) +
                           ", column " + std::to_string(column_no) + ")"),
        line(line_no),
        column(column_no) {}

  int line;
  int column;
};

}  // namespace mfg
