#pragma once

// Phase-space diagnostics: autocorrelation F(t) = <alpha|psi_alpha,t> with
// revival detection, and the Husimi function Q(gamma) = |<gamma|psi>|^2 / pi.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "kerrosc/fock.hpp"
#include "kerrosc/kerr_evolution.hpp"
#include "kerrosc/kerr_states.hpp"

namespace kerrosc {

// ---------------------------------------------------------------------------
// Autocorrelation

namespace detail {

/// sum_n exp(-i xi n^2) z^n / n!, scaled by exp(-scale_log); terms built in log
/// space and summed until the remaining tail is below 1e-16 of the prefactor.
inline cplx kerr_series(cplx z, double xi, double scale_log) {
  const double r = std::abs(z);
  if (r == 0.0) return std::exp(-scale_log);
  const double log_r = std::log(r);
  const double phase = std::arg(z);
  const int n_max = default_truncation(r) + 20;
  cplx sum{};
  for (int n = 0; n <= n_max; ++n) {
    const double log_mag = n * log_r - std::lgamma(n + 1.0) - scale_log;
    if (n > r && log_mag < -40.0) break;
    sum += std::exp(log_mag) * std::polar(1.0, n * phase) * kerr_phase(xi, n);
  }
  return sum;
}

}  // namespace detail

/// F(t) = e^{i arg G} e^{-(|alpha|^2 + |eta|^2)/2} sum e^{-i chi t n^2} (e^{-i Omega0 t} conj(alpha) eta)^n / n!.
inline cplx autocorrelation(const ModelParams& p, const WeiNormanSolution& sol, double t) {
  const auto s = sol.at(t);
  const cplx z = std::polar(1.0, -p.omega0 * t) * std::conj(p.alpha) * s.eta;
  const double scale = 0.5 * (std::norm(p.alpha) + std::norm(s.eta));
  return std::polar(1.0, global_phase(p, s, t)) * detail::kerr_series(z, p.chi * t, scale);
}

struct AutocorrSeries {
  std::vector<double> t;
  std::vector<cplx> f;
  std::vector<double> f2;  ///< |F|^2
  std::vector<double> revivals;
};

/// F on every grid time of `sol`.
inline AutocorrSeries autocorrelation_series(const ModelParams& p, const WeiNormanSolution& sol) {
  AutocorrSeries s;
  s.t = sol.t;
  s.f.reserve(sol.size());
  s.f2.reserve(sol.size());
  for (double t : sol.t) {
    const cplx f = autocorrelation(p, sol, t);
    s.f.push_back(f);
    s.f2.push_back(std::norm(f));
  }
  return s;
}

/// Five-point running median (window shrinks at the ends).
inline std::vector<double> median5(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i < 2 ? 0 : i - 2;
    const std::size_t hi = std::min(x.size(), i + 3);
    std::array<double, 5> w{};
    const auto len = hi - lo;
    std::copy(x.begin() + static_cast<long>(lo), x.begin() + static_cast<long>(hi), w.begin());
    std::nth_element(w.begin(), w.begin() + static_cast<long>(len / 2), w.begin() + static_cast<long>(len));
    out[i] = w[len / 2];
  }
  return out;
}

/// Interior local maxima of the median-filtered |F|^2 above `threshold`, sorted
/// by time. A flat top counts once, at its midpoint.
inline std::vector<double> detect_revivals(const AutocorrSeries& series, double threshold) {
  if (series.f2.empty()) throw std::invalid_argument("detect_revivals: empty series");
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_revivals: threshold must be > 0");
  const auto y = median5(series.f2);
  std::vector<double> times;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (y[i] > y[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && y[j + 1] == y[i]) ++j;
      if (j + 1 < n && y[j + 1] < y[i] && y[i] > threshold) times.push_back(series.t[(i + j) / 2]);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return times;
}

// ---------------------------------------------------------------------------
// Husimi distribution

struct PhaseSpaceGrid {
  std::vector<double> x;  ///< Re gamma samples
  std::vector<double> y;  ///< Im gamma samples
  std::vector<double> q;  ///< row-major: q[iy * x.size() + ix]
  double time = 0.0;

  double at(std::size_t ix, std::size_t iy) const { return q[iy * x.size() + ix]; }
  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  double dy() const { return y.size() > 1 ? y[1] - y[0] : 0.0; }

  /// Riemann sum of Q dx dy.
  double mass() const {
    double s = 0.0;
    for (double v : q) s += v;
    return s * dx() * dy();
  }
};

struct AxisRange {
  double lo = -1.0;
  double hi = 1.0;
};

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  v.back() = hi;
  return v;
}

/// <gamma|psi> = sum_n conj(<n|gamma>) psi_n with untruncated coherent amplitudes.
inline cplx coherent_overlap(cplx gamma, const FockState& psi) {
  const Vec& c = psi.amplitudes();
  const cplx step = std::conj(gamma);
  cplx term = std::exp(-0.5 * std::norm(gamma));
  cplx sum = term * c[0];
  for (int n = 1; n < c.size(); ++n) {
    term *= step / std::sqrt(static_cast<double>(n));
    sum += term * c[n];
  }
  return sum;
}

/// Q(gamma) = |<gamma|psi>|^2 / pi on a resolution_x x resolution_y grid.
inline PhaseSpaceGrid husimi_grid(const FockState& psi, AxisRange xr, AxisRange yr, int resolution_x,
                                  int resolution_y, double time = 0.0) {
  if (resolution_x < 2 || resolution_y < 2) throw std::invalid_argument("husimi_grid: resolution must be >= 2 per axis");
  if (!(xr.hi > xr.lo) || !(yr.hi > yr.lo)) throw std::invalid_argument("husimi_grid: empty axis range");
  PhaseSpaceGrid g;
  g.x = linspace(xr.lo, xr.hi, resolution_x);
  g.y = linspace(yr.lo, yr.hi, resolution_y);
  g.time = time;
  g.q.resize(g.x.size() * g.y.size());
  for (std::size_t iy = 0; iy < g.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      g.q[iy * g.x.size() + ix] = std::norm(coherent_overlap({g.x[ix], g.y[iy]}, psi)) / std::numbers::pi;
    }
  }
  return g;
}

inline PhaseSpaceGrid husimi_grid(const FockState& psi, AxisRange xr, AxisRange yr, int resolution,
                                  double time = 0.0) {
  return husimi_grid(psi, xr, yr, resolution, resolution, time);
}

/// Square window of half-width |alpha| + 5 centred at the origin.
inline AxisRange default_window(cplx alpha) {
  const double h = std::abs(alpha) + 5.0;
  return {-h, h};
}

/// (1/pi) e^{-(|gamma|^2 + |eta|^2)} |sum (conj(gamma) e^{-i Omega0 t} eta)^n e^{-i chi t n^2} / n!|^2.
inline double husimi_closed_form(const ModelParams& p, const WeiNormanSolution& sol, cplx gamma, double t) {
  const auto s = sol.at(t);
  const cplx z = std::conj(gamma) * std::polar(1.0, -p.omega0 * t) * s.eta;
  const double scale = 0.5 * (std::norm(gamma) + std::norm(s.eta));
  return std::norm(detail::kerr_series(z, p.chi * t, scale)) / std::numbers::pi;
}

/// Riemann sum of Q A dx dy with A sampled on the grid (same layout as q).
inline cplx husimi_expectation(const PhaseSpaceGrid& g, std::span<const cplx> samples) {
  if (samples.size() != g.q.size()) throw std::invalid_argument("husimi_expectation: grid mismatch");
  cplx s{};
  for (std::size_t i = 0; i < samples.size(); ++i) s += g.q[i] * samples[i];
  return s * g.dx() * g.dy();
}

/// Samples A(gamma, conj(gamma)) on the grid, then integrates.
inline cplx husimi_expectation(const PhaseSpaceGrid& g, const std::function<cplx(cplx)>& observable) {
  std::vector<cplx> a(g.q.size());
  for (std::size_t iy = 0; iy < g.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) a[iy * g.x.size() + ix] = observable({g.x[ix], g.y[iy]});
  }
  return husimi_expectation(g, a);
}

struct Peak {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Strict local maxima over the 8-neighbourhood exceeding rel_threshold * max Q.
inline std::vector<Peak> find_peaks(const PhaseSpaceGrid& g, double rel_threshold = 0.2) {
  const double qmax = *std::max_element(g.q.begin(), g.q.end());
  const double cut = rel_threshold * qmax;
  const long nx = static_cast<long>(g.x.size());
  const long ny = static_cast<long>(g.y.size());
  std::vector<Peak> peaks;
  for (long iy = 0; iy < ny; ++iy) {
    for (long ix = 0; ix < nx; ++ix) {
      const double v = g.at(ix, iy);
      if (v <= cut) continue;
      bool is_max = true;
      for (long dy = -1; dy <= 1 && is_max; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const long jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
          if (g.at(jx, jy) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({g.x[ix], g.y[iy], v});
    }
  }
  return peaks;
}

}  // namespace kerrosc
