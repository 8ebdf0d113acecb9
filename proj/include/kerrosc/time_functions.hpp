#pragma once

// Time-function descriptors: mass m(t), drive e(t), frequency Omega(t).

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>

#include "kerrosc/errors.hpp"

namespace kerrosc {

/// Monotone cubic (PCHIP) interpolant over strictly increasing sample times.
/// Evaluation outside [front, back] throws.
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> times, std::vector<double> values)
      : times_(times), values_(values) {
    if (times.size() != values.size()) throw std::invalid_argument("tabulated: times/values size mismatch");
    if (times.size() < 4) throw std::invalid_argument("tabulated: at least 4 samples required");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw std::invalid_argument("tabulated: times must be strictly increasing");
    }
    interp_ = std::make_shared<Pchip>(std::move(times), std::move(values));
  }

  double operator()(double t) const {
    if (t < times_.front() || t > times_.back()) {
      throw std::out_of_range("tabulated: t=" + format_number(t) + " outside [" + format_number(times_.front()) +
                              ", " + format_number(times_.back()) + "]");
    }
    return (*interp_)(t);
  }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }

  friend bool operator==(const TabulatedFunction& a, const TabulatedFunction& b) {
    return a.times_ == b.times_ && a.values_ == b.values_;
  }

 private:
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  std::vector<double> times_;
  std::vector<double> values_;
  std::shared_ptr<const Pchip> interp_;
};

/// Omega(t) = Omega0 [1 + 2k cos(2 Omega0 t)]; positivity requires k < 1/2.
struct FrequencySpec {
  double omega0 = 1.0;
  double k = 0.0;

  FrequencySpec() = default;
  FrequencySpec(double omega0_, double k_ = 0.0) : omega0(omega0_), k(k_) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("FrequencySpec: omega0 must be > 0");
    if (!(k >= 0.0) || !(k < 0.5)) throw std::invalid_argument("FrequencySpec: k must satisfy 0 <= k < 1/2");
  }

  double operator()(double t) const { return omega0 * (1.0 + 2.0 * k * std::cos(2.0 * omega0 * t)); }

  friend bool operator==(const FrequencySpec&, const FrequencySpec&) = default;
};

/// External drive e(t).
class DriveSpec {
 public:
  struct Zero {
    friend bool operator==(const Zero&, const Zero&) = default;
  };
  struct Constant {
    double value = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
  };
  /// amplitude * cos(frequency * t)
  struct Cosine {
    double amplitude = 1.0;
    double frequency = 1.0;
    friend bool operator==(const Cosine&, const Cosine&) = default;
  };
  using Kind = std::variant<Zero, Constant, Cosine, TabulatedFunction>;

  DriveSpec() = default;
  DriveSpec(Kind kind) : kind_(std::move(kind)) {}

  static DriveSpec zero() { return DriveSpec(Zero{}); }
  static DriveSpec constant(double value) { return DriveSpec(Constant{value}); }
  static DriveSpec cosine(double amplitude, double frequency) { return DriveSpec(Cosine{amplitude, frequency}); }
  static DriveSpec tabulated(std::vector<double> times, std::vector<double> values) {
    return DriveSpec(TabulatedFunction(std::move(times), std::move(values)));
  }

  double operator()(double t) const {
    return std::visit(
        [t](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, Zero>) {
            return 0.0;
          } else if constexpr (std::is_same_v<D, Constant>) {
            return d.value;
          } else if constexpr (std::is_same_v<D, Cosine>) {
            return d.amplitude * std::cos(d.frequency * t);
          } else {
            return d(t);
          }
        },
        kind_);
  }

  bool is_zero() const { return std::holds_alternative<Zero>(kind_); }

  /// Natural period of the drive (cosine only); falls back to `fallback`.
  double period_or(double fallback) const {
    if (const auto* c = std::get_if<Cosine>(&kind_); c && c->frequency != 0.0) {
      return 2.0 * std::numbers::pi / std::abs(c->frequency);
    }
    return fallback;
  }

  /// Throws unless e(t) is defined on [0, t_end].
  void check_window(double t_end) const {
    if (const auto* tab = std::get_if<TabulatedFunction>(&kind_)) {
      if (tab->t_min() > 0.0 || tab->t_max() < t_end) {
        throw std::invalid_argument("DriveSpec: tabulated drive does not cover [0, " + format_number(t_end) + "]");
      }
    }
  }

  const Kind& kind() const noexcept { return kind_; }

  friend bool operator==(const DriveSpec&, const DriveSpec&) = default;

 private:
  Kind kind_ = Zero{};
};

/// Time-dependent mass m(t) > 0.
class MassSpec {
 public:
  struct Constant {
    double m0 = 1.0;
    friend bool operator==(const Constant&, const Constant&) = default;
  };
  /// m0 * exp(rate * t)
  struct Exponential {
    double m0 = 1.0;
    double rate = 0.0;
    friend bool operator==(const Exponential&, const Exponential&) = default;
  };
  using Kind = std::variant<Constant, Exponential, TabulatedFunction>;

  MassSpec() = default;
  MassSpec(Kind kind) : kind_(std::move(kind)) { validate(); }

  static MassSpec constant(double m0) { return MassSpec(Constant{m0}); }
  static MassSpec exponential(double m0, double rate) { return MassSpec(Exponential{m0, rate}); }
  static MassSpec tabulated(std::vector<double> times, std::vector<double> masses) {
    return MassSpec(TabulatedFunction(std::move(times), std::move(masses)));
  }

  double operator()(double t) const {
    return std::visit(
        [t](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, Constant>) {
            return m.m0;
          } else if constexpr (std::is_same_v<M, Exponential>) {
            return m.m0 * std::exp(m.rate * t);
          } else {
            return m(t);
          }
        },
        kind_);
  }

  const Kind& kind() const noexcept { return kind_; }

  friend bool operator==(const MassSpec&, const MassSpec&) = default;

 private:
  void validate() const {
    std::visit(
        [](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, TabulatedFunction>) {
            for (double v : m.values()) {
              if (!(v > 0.0)) throw std::invalid_argument("MassSpec: non-positive mass sample");
            }
            if (m.t_min() != 0.0) throw std::invalid_argument("MassSpec: tabulated mass must start at t=0");
          } else {
            if (!(m.m0 > 0.0)) throw std::invalid_argument("MassSpec: m0 must be > 0");
          }
        },
        kind_);
  }

  Kind kind_ = Constant{};
};

}  // namespace kerrosc
