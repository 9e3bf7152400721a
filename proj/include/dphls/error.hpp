#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dphls {

enum class ErrorCode {
  Ok,
  // kernel/config validation
  MissingParam,
  NonIntegralParam,
  InconsistentLayers,
  PointerWidthTooSmall,
  InvalidConfig,
  SymbolKindMismatch,
  // sequences and files
  InvalidCharacter,
  EmptySequence,
  ProfileLengthMismatch,
  MalformedFasta,
  EmptyFile,
  MatrixShapeMismatch,
  UnknownResidue,
  MalformedSample,
  IoError,
  // engine
  SequenceTooLong,
  TracebackOutOfBounds,
  NonTerminating,
  // oracle / tooling guards
  OracleSizeExceeded,
  EnumerationSizeExceeded,
  TraceSizeExceeded,
  TilingStalled,
  UnknownKernel,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dphls
