#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpglite {

enum class ErrorCode {
  MissingAttribute,
  OutOfRange,
  DuplicateCharacter,
  GameOver,
  IllegalMove,
  StateBudgetExceeded,
  IncompletePolicy,
  TerminalState,
  EmptyMetagame,
  MissingArtifact,
  ReplayMismatch,
  SchemaViolation,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the library is reported through this type. The
// code is machine-checkable; `detail` names the offending attribute, slot or
// field where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace rpglite
