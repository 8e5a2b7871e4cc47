#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace claimforge {

// Bad input data or configuration. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::string message,
                           std::vector<std::string> violations = {})
      : std::runtime_error(std::move(message)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// A pipeline stage failed (provider exhausted retries, I/O error, ...).
// CLI maps this to exit code 2.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message,
             std::string detail = "")
      : std::runtime_error(stage + ": " + message),
        stage_(std::move(stage)),
        detail_(std::move(detail)) {}

  const std::string& stage() const { return stage_; }
  // Raw provider response or similar context, when available.
  const std::string& detail() const { return detail_; }

 private:
  std::string stage_;
  std::string detail_;
};

// A single transport attempt failed; complete()/fetch loops retry these.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Credentials rejected by a remote source. Never retried.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace claimforge
