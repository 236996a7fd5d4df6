#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace card {

enum class ErrorKind {
  SyntaxError,
  SortMismatch,
  UnknownSymbol,
  ConstNotEnabled,
  DuplicateSymbol,
  UnsupportedAtom,
  NotUnsat,
  MixedLiteral,
  NoTermFound,
  NoSeparatingTerm,
  AdapterFailure,
  UnverifiedInterpolant,
  UnsupportedFragment,
  BaseStillSat,
  DomainOverflow,
  BudgetExceeded,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace card
