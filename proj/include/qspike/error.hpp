#pragma once

#include <stdexcept>
#include <string>

namespace qspike {

// Error categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  argument = 2,
  io = 3,
  format = 4,
  numeric = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad values, shapes and indices supplied by the caller.
struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorKind::argument, "shape: " + what) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& what) : Error(ErrorKind::argument, "index: " + what) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

// An object was used out of sequence (e.g. a forward cache reused after the
// model changed).
struct StateError : Error {
  explicit StateError(const std::string& what) : Error(ErrorKind::argument, "state: " + what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

// Simulation or optimisation reached a state it cannot continue from
// (deadlocked chain, stale cache, non-finite values).
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

}  // namespace qspike
