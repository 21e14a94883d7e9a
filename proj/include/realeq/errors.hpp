#pragma once

#include <stdexcept>
#include <string>

namespace realeq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REALEQ_DEFINE_ERROR(Name)    \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

REALEQ_DEFINE_ERROR(InvalidArgument);
REALEQ_DEFINE_ERROR(NegationPresent);
REALEQ_DEFINE_ERROR(OddNegation);
REALEQ_DEFINE_ERROR(ConditionalPresent);
REALEQ_DEFINE_ERROR(NotConditional);
REALEQ_DEFINE_ERROR(TermBlowup);
REALEQ_DEFINE_ERROR(NotClosed);
REALEQ_DEFINE_ERROR(IndexOrder);
REALEQ_DEFINE_ERROR(MissingVariable);
REALEQ_DEFINE_ERROR(UnboundVariable);
REALEQ_DEFINE_ERROR(DuplicateBinder);
REALEQ_DEFINE_ERROR(UnknownState);
REALEQ_DEFINE_ERROR(UnknownAction);
REALEQ_DEFINE_ERROR(BadConstants);

#undef REALEQ_DEFINE_ERROR

/// Syntax error in one of the text formats; carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace realeq
