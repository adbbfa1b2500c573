#pragma once

#include <stdexcept>
#include <string>

namespace rdfront {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad bounds, empty input...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The time stepper produced values outside the admissible range.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// The moving window grew past its hard cap.
class WindowOverflow : public Error {
 public:
  using Error::Error;
};

/// A bisection could not establish a sign-changing bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// The solution fell below the ignition level everywhere.
class QuenchingError : public Error {
 public:
  using Error::Error;
};

/// No level crossing exists in a snapshot.
class NoCrossing : public Error {
 public:
  enum class Kind { kQuenched, kSaturated };

  NoCrossing(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A configuration file failed to parse or validate.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace rdfront
