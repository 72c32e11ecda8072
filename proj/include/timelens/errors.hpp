#pragma once

#include <stdexcept>
#include <string>

namespace timelens {

/// Bad or inconsistent configuration input (CLI maps this to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a pipeline stage (CLI maps this to exit code 3).
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace timelens
