#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qcbm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, out-of-range index, bad shape.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A request whose size exceeds a documented cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An estimator had no data in the stratum it needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The input carries no usable probability mass (e.g. everything collides).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset file; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Run-config validation failure. Collects every problem found in one pass,
/// each prefixed with its JSON path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid config:";
    for (const auto& item : items) out += "\n  " + item;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace qcbm
