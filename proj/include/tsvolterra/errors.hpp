#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tsvolterra {

// Every failure in the library carries one of these kinds. The CLI maps them
// to exit codes (schema/input problems vs. solver-domain problems).
enum class Errc {
  EmptyScale,
  NonMonotone,
  NotAPoint,
  KappaBoundary,
  NotRegressive,
  DivisionByZero,
  BackwardUnsupported,
  SyntaxError,
  UnknownFunction,
  BadArity,
  UnboundVariable,
  BadArgument,
  Truncated,
  MaxIterations,
  ZeroDiagonal,
  NonzeroAtA,
  OrderTooHigh,
  LambdaZero,
  DomainExit,
  InvalidProblem,
  SchemaError,
  GridMismatch,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        raw_(message) {}

  // offset is a 1-based byte position into the offending source text
  Error(Errc code, const std::string& message, std::size_t offset)
      : std::runtime_error(std::string(errc_name(code)) + " at offset " +
                           std::to_string(offset) + ": " + message),
        code_(code),
        raw_(message),
        offset_(offset) {}

  Errc code() const noexcept { return code_; }
  const std::string& raw_message() const noexcept { return raw_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
  Errc code_;
  std::string raw_;
  std::optional<std::size_t> offset_;
};

}  // namespace tsvolterra
