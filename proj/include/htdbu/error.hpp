#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace htdbu {

enum class ErrorKind {
  MissingFile,
  SchemaMismatch,
  EmptyTable,
  EmptyInput,
  DegenerateSplit,
  UnknownColumn,
  ParseError,
  InvalidRule,
  UnsatisfiableRule,
  NotPSD,
  NonBinaryTarget,
  LengthMismatch,
  NoNumericColumns,
  NoCategoricalColumns,
  MissingXModal,
  ConfigError,
  IOError,
};

std::string_view to_string(ErrorKind kind);

/// All library failures surface as this exception; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace htdbu
