#include "htdbu/error.hpp"

namespace htdbu {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidRule: return "InvalidRule";
    case ErrorKind::UnsatisfiableRule: return "UnsatisfiableRule";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NonBinaryTarget: return "NonBinaryTarget";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoNumericColumns: return "NoNumericColumns";
    case ErrorKind::NoCategoricalColumns: return "NoCategoricalColumns";
    case ErrorKind::MissingXModal: return "MissingXModal";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Error";
}

}  // namespace htdbu
