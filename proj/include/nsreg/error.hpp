#pragma once

#include <stdexcept>
#include <string>

namespace nsreg {

/// Failure categories; the numeric values are the CLI exit codes.
enum class ErrorKind : int { config = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Non-finite data, CFL violation, NaN blow-up.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::string tag = "numerical")
      : Error(ErrorKind::numerical, what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace nsreg
