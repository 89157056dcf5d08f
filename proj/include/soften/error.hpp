#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace soften {

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }

  std::string to_string() const {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (known()) out += ":" + std::to_string(line) + ":" + std::to_string(column);
    return out;
  }
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the kernel when a judgment fails.
class TypeError : public Error {
 public:
  using Error::Error;
};

/// Raised by the parser; carries the position of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(SourceLocation where, const std::string& message)
      : Error(where.to_string() + ": " + message), location_(std::move(where)) {}

  const SourceLocation& location() const { return location_; }

 private:
  SourceLocation location_;
};

/// Raised when a diagram operator is undefined on its input.
class TranslationError : public Error {
 public:
  using Error::Error;
};

/// Normalization exceeded its step budget. Only reachable on ill-typed input.
class FuelExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace soften
