#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>

#include "kerrosc/errors.hpp"

namespace kerrosc {

namespace detail {

template <class F, class T>
T simpson_refine(F& f, double a, double b, T fa, T fm, T fb, T whole, double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const T delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * abs_tol) return left + right + delta / 15.0;
  if (depth <= 0) throw numerical_error("adaptive_simpson: recursion limit reached", m);
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of a real or complex integrand on [a, b].
/// The error target is rel_tol times a coarse estimate of int |f|.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-10, int max_depth = 48) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) return T{};
  // coarse magnitude scale from a 64-panel composite rule
  constexpr int panels = 64;
  const double h = (b - a) / panels;
  double scale = 0.0;
  T total{};
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    const double x1 = (i + 1 == panels) ? b : x0 + h;
    const T f0 = f(x0), fm = f(0.5 * (x0 + x1)), f1 = f(x1);
    scale += std::abs(x1 - x0) * (std::abs(f0) + 4.0 * std::abs(fm) + std::abs(f1)) / 6.0;
  }
  const double abs_tol = std::max(rel_tol * scale, 1e-300);
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    const double x1 = (i + 1 == panels) ? b : x0 + h;
    const T f0 = f(x0), fm = f(0.5 * (x0 + x1)), f1 = f(x1);
    const T whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::simpson_refine(f, x0, x1, f0, fm, f1, whole, abs_tol / panels, max_depth);
  }
  return total;
}

}  // namespace kerrosc
