#pragma once

#include <stdexcept>
#include <string>

namespace ffsing {

// Contract violation raised by a library operation. `code` is a short
// upper-case token (e.g. "ORDER_MISMATCH") that the CLI prints verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Malformed text input.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("PARSE", message) {}
};

// File could not be opened or read.
class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IO", message) {}
};

}  // namespace ffsing
