#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftstream {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define DRIFTSTREAM_DEFINE_ERROR(Name) \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

DRIFTSTREAM_DEFINE_ERROR(EmptyStream);
DRIFTSTREAM_DEFINE_ERROR(InvalidFraction);
DRIFTSTREAM_DEFINE_ERROR(EmptyTrainingSet);
DRIFTSTREAM_DEFINE_ERROR(DimensionMismatch);
DRIFTSTREAM_DEFINE_ERROR(ValueOutOfRange);
DRIFTSTREAM_DEFINE_ERROR(EmptyInput);
DRIFTSTREAM_DEFINE_ERROR(UnlabeledSample);
DRIFTSTREAM_DEFINE_ERROR(WarmupTooSmall);
DRIFTSTREAM_DEFINE_ERROR(InsufficientTimeSpan);
DRIFTSTREAM_DEFINE_ERROR(InsufficientData);
DRIFTSTREAM_DEFINE_ERROR(ClassMissingInFold);
DRIFTSTREAM_DEFINE_ERROR(InvalidSpec);
DRIFTSTREAM_DEFINE_ERROR(IoError);
DRIFTSTREAM_DEFINE_ERROR(EmptyCounts);
DRIFTSTREAM_DEFINE_ERROR(ConfigError);

#undef DRIFTSTREAM_DEFINE_ERROR

}  // namespace driftstream
