#pragma once

#include <stdexcept>
#include <string>

namespace nmk {

// Invalid model parameters or malformed configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical quantity was requested where it does not exist (divergent noise,
// unstable point, blow-up). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace nmk
