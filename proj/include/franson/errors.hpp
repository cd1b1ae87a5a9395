#pragma once

#include <stdexcept>
#include <string>

namespace franson {

/// Wavelength (or other argument) outside the interval a model is valid for.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument has no physical meaning (e.g. a conjugate wavelength that does not exist).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Least-squares problem is rank deficient or otherwise cannot be solved.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tally has no post-selected events.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `key()` names the offending `section.key`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace franson
