#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpgraph {

enum class ErrorCode {
  parse_error,
  empty_input,
  dimension_mismatch,
  duplicate_round,
  stale_round,
  negative_value,
  invalid_argument,
  unknown_session,
  unknown_round,
  internal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::duplicate_round: return "duplicate_round";
    case ErrorCode::stale_round: return "stale_round";
    case ErrorCode::negative_value: return "negative_value";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::unknown_round: return "unknown_round";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based input line (0 when not line oriented).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::parse_error, line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rpgraph
