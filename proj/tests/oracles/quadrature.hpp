// Copyright 2026 The turbosmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Adaptive Simpson quadrature in one and two dimensions.

#ifndef TURBOSMOOTH_TESTS_ORACLES_QUADRATURE_HPP
#define TURBOSMOOTH_TESTS_ORACLES_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Integrates f over [a, b] to an absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40) {
  // Split once so a peak sitting on the midpoint cannot fool the first estimate.
  double total = 0.0;
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = lo + h;
    const double fa = f(lo);
    const double fm = f(0.5 * (lo + hi));
    const double fb = f(hi);
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol / kPanels, max_depth);
  }
  return total;
}

/// Integrates f with a tolerance scaled by the integrand's size on [a, b], so
/// tiny integrals are resolved to the same relative accuracy as large ones.
inline double integrate_scaled(const std::function<double(double)>& f, double a, double b,
                               double rel) {
  double peak = 0.0;
  constexpr int kProbes = 2048;
  for (int i = 0; i <= kProbes; ++i) {
    peak = std::max(peak, std::abs(f(a + (b - a) * i / kProbes)));
  }
  return integrate(f, a, b, rel * peak * (b - a));
}

/// Iterated integral over [ax, bx] x [ay, by].
inline double integrate2(const std::function<double(double, double)>& f, double ax, double bx,
                         double ay, double by, double tol) {
  const double width = bx - ax;
  return integrate(
      [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, tol / width, 30);
      },
      ax, bx, tol, 30);
}

inline double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace oracle

#endif  // TURBOSMOOTH_TESTS_ORACLES_QUADRATURE_HPP
