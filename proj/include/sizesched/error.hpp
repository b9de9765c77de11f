#pragma once

#include <stdexcept>
#include <string>

namespace sizesched {

/// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorKind {
  config,      // bad parameters or configuration
  input,       // unreadable or inconsistent trace/workload
  simulation,  // engine or policy contract violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SIZESCHED_DEFINE_ERROR(Name, Kind)                                     \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}   \
  };

SIZESCHED_DEFINE_ERROR(InvalidConfig, config)
SIZESCHED_DEFINE_ERROR(InvalidParams, config)
SIZESCHED_DEFINE_ERROR(UnknownScheduler, config)
SIZESCHED_DEFINE_ERROR(IoError, input)
SIZESCHED_DEFINE_ERROR(DegenerateTrace, input)
SIZESCHED_DEFINE_ERROR(ZeroSizeJob, input)
SIZESCHED_DEFINE_ERROR(InvalidWorkload, input)
SIZESCHED_DEFINE_ERROR(NonPositiveSize, input)
SIZESCHED_DEFINE_ERROR(PolicyViolation, simulation)
SIZESCHED_DEFINE_ERROR(NonTermination, simulation)
SIZESCHED_DEFINE_ERROR(IncompleteRun, simulation)
SIZESCHED_DEFINE_ERROR(EmptyInput, simulation)

#undef SIZESCHED_DEFINE_ERROR

/// Non-numeric or missing field in a trace row (1-based line number).
class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& detail)
      : Error(ErrorKind::input,
              "malformed row at line " + std::to_string(line) + ": " + detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NegativeValue : public Error {
 public:
  NegativeValue(std::size_t line, const std::string& field)
      : Error(ErrorKind::input, "negative " + field + " at line " +
                                    std::to_string(line)),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace sizesched
