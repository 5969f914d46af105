#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frontier_rd {

// Usage errors are caller mistakes (bad config, unknown names, malformed
// input files). Runtime errors are numerical or data failures discovered
// while computing. The CLI maps them to exit codes 2 and 1.
enum class ErrorKind { usage, runtime };

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ErrorKind kind = ErrorKind::runtime)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what, ErrorKind::usage),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(what, ErrorKind::usage) {}
};

class DuplicateError : public Error {
 public:
  explicit DuplicateError(const std::string& what) : Error(what, ErrorKind::usage) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, ErrorKind::usage) {}
};

// Unknown variable, outcome or model field.
class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what) : Error(what, ErrorKind::usage) {}
};

// Invalid synthetic-generator parameters.
class ParamError : public Error {
 public:
  explicit ParamError(const std::string& what) : Error(what, ErrorKind::usage) {}
};

class DesignError : public Error {
 public:
  explicit DesignError(const std::string& what) : Error(what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what) : Error(what) {}
};

class RankError : public Error {
 public:
  explicit RankError(const std::string& what) : Error(what) {}
};

class InferenceError : public Error {
 public:
  explicit InferenceError(const std::string& what) : Error(what) {}
};

class DegenerateInstrumentError : public Error {
 public:
  explicit DegenerateInstrumentError(const std::string& what) : Error(what) {}
};

class DegenerateSupportError : public Error {
 public:
  explicit DegenerateSupportError(const std::string& what) : Error(what) {}
};

class BinCountError : public Error {
 public:
  explicit BinCountError(const std::string& what) : Error(what) {}
};

}  // namespace frontier_rd
