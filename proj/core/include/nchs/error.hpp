#pragma once

#include <stdexcept>
#include <string>

namespace nchs {

/// Failure classes. The CLI maps each one to its own exit code.
enum class ErrorCategory { config, solver, check_failed, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorCategory::solver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class CheckFailed : public Error {
 public:
  explicit CheckFailed(const std::string& what) : Error(ErrorCategory::check_failed, what) {}
};

}  // namespace nchs
