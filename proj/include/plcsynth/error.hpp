#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcsynth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidIdentifier : public Error {
public:
  explicit InvalidIdentifier(const std::string &text)
      : Error("invalid identifier '" + text + "'") {}
};

class UnboundVariable : public Error {
public:
  explicit UnboundVariable(std::string name)
      : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
  const std::string &name() const { return name_; }

private:
  std::string name_;
};

/// A temp variable was read before being assigned in the current cycle.
class UnassignedTemp : public Error {
public:
  explicit UnassignedTemp(std::string name, long cycle = -1)
      : Error(cycle < 0 ? "temp '" + name + "' read before assignment"
                        : "temp '" + name + "' read before assignment in cycle " +
                              std::to_string(cycle)),
        name_(std::move(name)), cycle_(cycle) {}
  const std::string &name() const { return name_; }
  long cycle() const { return cycle_; }

private:
  std::string name_;
  long cycle_;
};

class TypeError : public Error {
public:
  using Error::Error;
};

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
};

class ParseError : public Error {
public:
  ParseError(SourceSpan span, const std::string &message,
             std::vector<std::string> expected = {})
      : Error(std::to_string(span.line) + ":" + std::to_string(span.column) +
              ": " + message),
        span_(span), message_(message), expected_(std::move(expected)) {}

  const SourceSpan &span() const { return span_; }
  const std::string &message() const { return message_; }
  const std::vector<std::string> &expected() const { return expected_; }

private:
  SourceSpan span_;
  std::string message_;
  std::vector<std::string> expected_;
};

/// IL: a combining or store instruction with no loaded accumulator.
class AccumulatorUndefined : public ParseError {
public:
  using ParseError::ParseError;
};

class UnbalancedParen : public ParseError {
public:
  using ParseError::ParseError;
};

class SchemaError : public Error {
public:
  SchemaError(std::size_t line, const std::string &message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

class RenameCollision : public Error {
public:
  using Error::Error;
};

class MissingRenameTarget : public Error {
public:
  using Error::Error;
};

/// The constraints admit no program at all.
class Unsatisfiable : public Error {
public:
  using Error::Error;
};

class SizeBoundExceeded : public Error {
public:
  explicit SizeBoundExceeded(int max_slots)
      : Error("no program with at most " + std::to_string(max_slots) +
              " slots satisfies the constraints"),
        max_slots_(max_slots) {}
  int max_slots() const { return max_slots_; }

private:
  int max_slots_;
};

class InsufficientSamples : public Error {
public:
  using Error::Error;
};

/// A self-check inside the library failed. Always a bug.
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace plcsynth
