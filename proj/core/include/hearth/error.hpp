#pragma once

#include <stdexcept>
#include <string>

namespace hearth {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document (scene, catalog, program, action).
class ParseError : public Error {
 public:
  ParseError(std::string message, int line = 0, int column = 0, std::string field = {})
      : Error(format(message, line, column, field)),
        line_(line),
        column_(column),
        field_(std::move(field)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& m, int line, int col, const std::string& field) {
    std::string out = m;
    if (!field.empty()) out += " (at " + field + ")";
    if (line > 0) out += " [line " + std::to_string(line) + ", column " + std::to_string(col) + "]";
    return out;
  }

  int line_;
  int column_;
  std::string field_;
};

/// Errors raised by external model clients (HTTP or scripted).
class ClientError : public Error {
 public:
  using Error::Error;
};

}  // namespace hearth
