#pragma once

#include <stdexcept>
#include <string>

namespace zklab {

// A checked identity or bound failed in a way that falsifies the contract.
class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration or usage; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zklab
