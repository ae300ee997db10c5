#pragma once

#include <stdexcept>
#include <string>

namespace ces {

// A position does not address a node of the term.
class PositionOutOfTerm : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed term, context or signature.
class TermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Text input that does not follow the concrete syntax. Carries a 1-based location.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::invalid_argument(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// A position-based strategy violates the well-founded ordering.
class NotWellFounded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A strategy with free fixed-point variables was evaluated.
class OpenStrategy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An unfolding map misses a bound variable.
class IncompleteMap : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A fixed-point variable does not occur exactly once.
class VariableNotLinear : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unification inputs are not closed, monotone, linear and well-founded.
class ValidationFailure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The reduction measure failed to decrease. Signals an engine bug.
class MeasureViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ces
