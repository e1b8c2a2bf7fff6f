#pragma once

#include <stdexcept>
#include <string>

namespace combgate {

/// Error categories surfaced by the command-line harness as exit codes.
enum class ErrorCategory { Config, Physics, Numerics };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed input files, unknown keys or units, violated data invariants.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

/// Inputs that are well formed but put the model outside its regime.
class PhysicsError : public Error {
 public:
  explicit PhysicsError(const std::string& what) : Error(ErrorCategory::Physics, what) {}
};

/// Quadrature or integrator failures.
class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& what) : Error(ErrorCategory::Numerics, what) {}
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Physics: return "physics";
    case ErrorCategory::Numerics: return "numerics";
  }
  return "unknown";
}

}  // namespace combgate
