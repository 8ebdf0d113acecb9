#pragma once

#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kerrosc {

/// Six significant digits, for error messages.
inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Failure of a numerical stage: integrator breakdown, truncation overflow,
/// loss of unitarity. Carries the simulation time at which it was detected
/// (NaN when the failure is not tied to a time).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what, double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The truncated basis is too small for the requested state.
class truncation_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Invalid scenario configuration; `key()` names the offending entry.
class config_error : public std::runtime_error {
 public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace kerrosc
