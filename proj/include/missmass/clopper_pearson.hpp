#pragma once
/*
Exact (Clopper-Pearson) two-sided confidence interval for a binomial
proportion, via the regularized incomplete beta function:
  lower = BetaInv(alpha/2;     k,     n-k+1)   (0 when k = 0)
  upper = BetaInv(1 - alpha/2; k + 1, n-k)     (1 when k = n)
The k = 0 and k = n edges use the closed forms 1 - (alpha/2)^(1/n) and
(alpha/2)^(1/n). I_x(a,b) is evaluated with the standard Lentz continued
fraction and inverted by bisection.
*/
#include <cmath>
#include <cstdint>
#include <limits>

#include "missmass/errors.hpp"

namespace missmass {

namespace detail {

inline double ibeta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) fail(errc::bad_param, "ibeta requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * detail::ibeta_cf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

// x with I_x(a, b) = p, by bisection (I_x is increasing in x).
inline double incomplete_beta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

inline ConfidenceInterval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                                          double confidence = 0.99) {
  if (trials == 0) fail(errc::bad_param, "clopper_pearson requires trials >= 1");
  if (successes > trials) fail(errc::bad_param, "successes > trials");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    fail(errc::bad_param, "confidence must be in (0,1)");
  const double half_alpha = 0.5 * (1.0 - confidence);
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  ConfidenceInterval ci;
  ci.low = (successes == 0) ? 0.0
           : (successes == trials)
               ? std::pow(half_alpha, 1.0 / n)
               : incomplete_beta_inv(k, n - k + 1.0, half_alpha);
  ci.high = (successes == trials) ? 1.0
            : (successes == 0)
                ? 1.0 - std::pow(half_alpha, 1.0 / n)
                : incomplete_beta_inv(k + 1.0, n - k, 1.0 - half_alpha);
  return ci;
}

}  // namespace missmass
