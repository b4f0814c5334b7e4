#pragma once

#include <stdexcept>
#include <string>

namespace evlander {

/// Coarse failure category; drives the CLI exit-code contract
/// (2 = rejected input/config, 1 = runtime/numerical failure).
enum class ErrorKind {
  InvalidInput,
  Config,
  Numerical,
  Io,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    return (kind_ == ErrorKind::InvalidInput || kind_ == ErrorKind::Config) ? 2 : 1;
  }

private:
  ErrorKind kind_;
};

/// Parse/validation failure with file and line provenance.
class ValidationError : public Error {
public:
  ValidationError(std::string file, long line, const std::string& message)
      : Error(ErrorKind::InvalidInput,
              file.empty() ? message
                           : file + (line > 0 ? ":" + std::to_string(line) : "") + ": " + message),
        file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }

private:
  std::string file_;
  long line_ = 0;
};

/// Projection or matrix inversion hit a (near-)singular configuration.
class SingularityError : public Error {
public:
  explicit SingularityError(const std::string& message)
      : Error(ErrorKind::Numerical, message) {}
};

/// Iterative estimation left the valid region; carries the failing iteration.
class DivergenceError : public Error {
public:
  DivergenceError(int iteration, const std::string& message)
      : Error(ErrorKind::Numerical, "iteration " + std::to_string(iteration) + ": " + message),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

private:
  int iteration_ = 0;
};

/// Input is structurally valid but carries no usable signal (e.g. all-zero frame).
class DegenerateInputError : public Error {
public:
  explicit DegenerateInputError(const std::string& message)
      : Error(ErrorKind::Numerical, message) {}
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorKind::Config, msg);
}
[[noreturn]] inline void throw_numerical(const std::string& msg) {
  throw Error(ErrorKind::Numerical, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorKind::Io, msg);
}

}  // namespace evlander
