#pragma once
/*
Deviation bounds for the missing mass with an exponent linear in epsilon.

Core quantities, for 0 < eps < 1:
  gamma_eps = -2 * W_{-1}(-eps / (2*sqrt(e)))        (> 2, decreasing in eps)
  c(eps)    = 3*(gamma_eps - 1) / (5*gamma_eps^2)
  P(Y - E[Y] >= eps)  <= exp(-c(eps) * n * eps)   for n >= ceil(gamma_eps) - 1,
and the same for the lower tail; the two-sided form doubles the bound.

gamma_eps is the stationary point of the exponent rate
  c(gamma, eps) = 3*(gamma - 1)^2 / (10 * gamma^2 * ln(gamma/eps)),
equivalently the root of gamma - 1 - 2*ln(gamma/eps) = 0, which is how the
closed form and the numeric optimizer cross-check each other.
*/
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "missmass/errors.hpp"
#include "missmass/lambert.hpp"

namespace missmass {

enum class BoundSide { upper, lower, two_sided };

inline const char* bound_side_name(BoundSide s) {
  switch (s) {
    case BoundSide::upper: return "upper";
    case BoundSide::lower: return "lower";
    case BoundSide::two_sided: return "two_sided";
  }
  return "?";
}

struct BoundResult {
  double epsilon = 0.0;
  std::uint64_t n = 0;
  double gamma = 0.0;
  double c = 0.0;
  double exponent = 0.0;  // c(eps) * n * eps
  double bound = 1.0;     // e^{-exponent}, doubled and capped at 1 for two_sided
  std::uint64_t n_min = 0;
  bool domain_ok = false;
  BoundSide side = BoundSide::upper;
};

// Comparator family e^{-a * n * eps^2} (the eps^2-exponent state of the art).
struct ComparatorSpec {
  static constexpr int exponent_power = 2;  // the family is fixed at eps^2

  double coefficient = 1.0;
  BoundSide side = BoundSide::upper;
  std::string source_label;
};

namespace detail {

inline void check_epsilon(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0) || !std::isfinite(eps))
    fail(errc::epsilon_out_of_range, "epsilon must be in (0,1), got " + std::to_string(eps));
}

// Root of gamma - 1 - 2*ln(gamma/eps) on (2, 200), by plain bisection.
// Used to refine the optimizer; the closed form goes through W_{-1}.
inline double stationary_gamma_bisect(double eps, double lo, double hi) {
  auto s = [eps](double g) { return g - 1.0 - 2.0 * std::log(g / eps); };
  double flo = s(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = s(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline double gamma_eps(double eps) {
  detail::check_epsilon(eps);
  const double arg = -eps / (2.0 * std::sqrt(std::numbers::e));
  return -2.0 * lambert_w_minus1(arg).value;
}

inline double c_eps(double eps) {
  const double g = gamma_eps(eps);
  return 3.0 * (g - 1.0) / (5.0 * g * g);
}

// Exponent rate at a free gamma; equals c_eps(eps) at gamma = gamma_eps(eps).
inline double c_general(double gamma, double eps) {
  detail::check_epsilon(eps);
  if (!(gamma > std::max(1.0, std::numbers::e * eps)) || !(gamma / eps > 1.0))
    fail(errc::gamma_out_of_domain,
         "gamma=" + std::to_string(gamma) + " outside (max(1, e*eps), inf)");
  const double g1 = gamma - 1.0;
  return 3.0 * g1 * g1 / (10.0 * gamma * gamma * std::log(gamma / eps));
}

// Numeric maximizer of c_general over gamma: golden-section localization
// followed by bisection on the stationarity condition.
inline double optimize_gamma(double eps) {
  detail::check_epsilon(eps);
  double lo = std::max(std::numbers::e * eps, 2.0) + 1e-9;
  double hi = 200.0;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = c_general(x1, eps), f2 = c_general(x2, eps);
  while (b - a > 1e-3) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = c_general(x2, eps);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = c_general(x1, eps);
    }
  }
  return detail::stationary_gamma_bisect(eps, std::max(lo, a - 1.0), std::min(hi, b + 1.0));
}

inline std::uint64_t min_sample_size(double eps) {
  return static_cast<std::uint64_t>(std::ceil(gamma_eps(eps))) - 1;
}

inline BoundResult missing_mass_bound(double eps, std::uint64_t n, BoundSide side) {
  detail::check_epsilon(eps);
  BoundResult r;
  r.epsilon = eps;
  r.n = n;
  r.side = side;
  r.gamma = gamma_eps(eps);
  r.c = 3.0 * (r.gamma - 1.0) / (5.0 * r.gamma * r.gamma);
  r.exponent = r.c * static_cast<double>(n) * eps;
  r.n_min = static_cast<std::uint64_t>(std::ceil(r.gamma)) - 1;
  r.domain_ok = (n >= r.n_min);
  const double one_sided = std::exp(-r.exponent);
  r.bound = (side == BoundSide::two_sided) ? std::min(1.0, 2.0 * one_sided) : one_sided;
  return r;
}

// Bias bound for the split transform, sqrt(e) * exp(W_{-1}(-eps/(2*sqrt(e)))).
// Identical to eps / gamma_eps, which callers can use as a cross-check.
inline double compensation_gap_bound(double eps) {
  detail::check_epsilon(eps);
  const double arg = -eps / (2.0 * std::sqrt(std::numbers::e));
  return std::sqrt(std::numbers::e) * std::exp(lambert_w_minus1(arg).value);
}

// Bernstein tail exp(-eps^2 / (2*(V + alpha*eps/3))) for zero-mean summands
// bounded by alpha with variance proxy V.
inline double bernstein_bound(double V, double alpha, double eps) {
  if (!(V >= 0.0)) fail(errc::negative_variance, "V=" + std::to_string(V));
  if (!(alpha > 0.0)) fail(errc::bad_param, "alpha must be > 0");
  if (!(eps > 0.0)) fail(errc::epsilon_out_of_range, "eps must be > 0");
  return std::exp(-eps * eps / (2.0 * (V + alpha * eps / 3.0)));
}

// (theta/n) * e^{-theta}: the cap on the variance proxy of a distribution
// whose bins all lie in [theta/n, 2*theta/n).
inline double variance_proxy_bound(double theta, std::uint64_t n, double eps) {
  if (!(theta > 1.0) || !(theta < static_cast<double>(n)))
    fail(errc::theta_out_of_range, "requires 1 < theta < n");
  if (!(std::exp(-theta) < eps))
    fail(errc::theta_out_of_range, "requires e^{-theta} < eps");
  return (theta / static_cast<double>(n)) * std::exp(-theta);
}

// Deviation size below which the linear-exponent bound beats the comparator
// e^{-a n eps^2}: the root of c(eps) = a * eps. c(eps)/eps is checked to be
// strictly decreasing on the bracket, so the root is unique when it exists.
inline double crossover(const ComparatorSpec& comparator) {
  if (!(comparator.coefficient > 0.0))
    fail(errc::bad_param, "comparator coefficient must be > 0");
  const double a = comparator.coefficient;
  const double lo0 = 1e-6, hi0 = 0.99;
  auto h = [](double e) { return c_eps(e) / e; };

  double prev = h(lo0);
  for (int i = 1; i <= 64; ++i) {
    const double e = lo0 * std::pow(hi0 / lo0, i / 64.0);
    const double cur = h(e);
    if (!(cur < prev)) throw std::logic_error("c(eps)/eps not strictly decreasing");
    prev = cur;
  }

  double lo = lo0, hi = hi0;
  if ((h(lo) - a) < 0.0 || (h(hi) - a) > 0.0)
    fail(errc::no_crossover,
         "c(eps)/eps - " + std::to_string(a) + " has no sign change on (1e-6, 0.99)");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) - a > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace missmass
