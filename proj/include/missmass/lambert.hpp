#pragma once
/*
Lower real branch W_{-1} of the Lambert W function (inverse of x = w*e^w)
on [-1/e, 0), where W_{-1} <= -1.

Initial guess: a branch-point expansion in s = sqrt(2*(1 + e*x)) near -1/e,
   w ~= -1 - s - s^2/3 - 11*s^3/72,
and the asymptotic form near 0^-,
   w ~= L1 - L2 + L2/L1,  L1 = ln(-x), L2 = ln(-L1).
The guess is polished by Halley iteration on f(w) = w*e^w - x, which is
third-order and needs only a handful of steps from either start.
*/
#include <cmath>
#include <limits>
#include <string>

#include "missmass/errors.hpp"

namespace missmass {

struct WResult {
  double value = 0.0;     // w with w*e^w = x, w <= -1
  double residual = 0.0;  // |w*e^w - x|
  int iterations = 0;
};

inline WResult lambert_w_minus1(double x) {
  constexpr double kInvE = 0.36787944117144232160;  // 1/e
  if (!std::isfinite(x) || x >= 0.0 || x < -kInvE - 1e-12)
    fail(errc::domain_error,
         "lambert_w_minus1 requires -1/e <= x < 0, got " + std::to_string(x));

  // The derivative blows up at the branch point; treat its neighborhood exactly.
  if (x + kInvE < 1e-12) return WResult{-1.0, std::fabs(-kInvE - x), 0};

  double w;
  if (x < -0.25) {
    const double s = std::sqrt(2.0 * (1.0 + x / kInvE));
    w = -1.0 - s - s * s / 3.0 - 11.0 * s * s * s / 72.0;
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  if (w > -1.000001) w = -1.000001;

  int it = 0;
  for (; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) break;
    const double step =
        2.0 * (w + 1.0) * f / (x * (w + 2.0) + ew * (w * (w + 2.0) + 2.0));
    double next = w - step;
    // f' vanishes at -1; an overshoot past the branch value bisects instead.
    if (next >= -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::fabs(next - w) <= 1e-14 * std::max(1.0, std::fabs(w));
    w = next;
    if (done) {
      ++it;
      break;
    }
  }
  return WResult{w, std::fabs(w * std::exp(w) - x), it};
}

}  // namespace missmass
