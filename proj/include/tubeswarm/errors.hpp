#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tubeswarm {

/// Argument outside the mathematical domain of an operation (arc length
/// beyond [0, L], negative density, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A velocity too short to carry a direction was handed to the saturation.
class DegenerateDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One problem found while validating a configuration document.
struct ConfigIssue {
  std::string path;
  std::string message;
};

/// Configuration rejected; carries every issue found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  ConfigError(std::string path, std::string message);

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace tubeswarm
