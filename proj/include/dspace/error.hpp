#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dspace {

enum class Errc {
  invalid_argument,
  parse_error,
  duplicate_di,
  invalid_weight,
  invalid_interval,
  not_comparable,
  unknown_dsi,
  unknown_dimension,
  unknown_column,
  unresolvable,
  arity_overflow,
  kind_mismatch,
  out_of_range,
  fixed_part_mutation,
  invalid_transition,
  forbidden,
  inconsistent_same_as,
  no_side_index,
  not_found,
  no_snapshot,
  not_bridge_generated,
  io_error,
};

inline std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::parse_error: return "parse_error";
    case Errc::duplicate_di: return "duplicate_di";
    case Errc::invalid_weight: return "invalid_weight";
    case Errc::invalid_interval: return "invalid_interval";
    case Errc::not_comparable: return "not_comparable";
    case Errc::unknown_dsi: return "unknown_dsi";
    case Errc::unknown_dimension: return "unknown_dimension";
    case Errc::unknown_column: return "unknown_column";
    case Errc::unresolvable: return "unresolvable";
    case Errc::arity_overflow: return "arity_overflow";
    case Errc::kind_mismatch: return "kind_mismatch";
    case Errc::out_of_range: return "out_of_range";
    case Errc::fixed_part_mutation: return "fixed_part_mutation";
    case Errc::invalid_transition: return "invalid_transition";
    case Errc::forbidden: return "forbidden";
    case Errc::inconsistent_same_as: return "inconsistent_same_as";
    case Errc::no_side_index: return "no_side_index";
    case Errc::not_found: return "not_found";
    case Errc::no_snapshot: return "no_snapshot";
    case Errc::not_bridge_generated: return "not_bridge_generated";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library. `code()` is stable and is what the
/// HTTP layer maps to a status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Syntax error with a 1-based line/column position into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(Errc::parse_error, "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dspace
