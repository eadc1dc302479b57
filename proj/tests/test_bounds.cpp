#include <doctest.h>

#include <cmath>
#include <vector>

#include "missmass/bounds.hpp"
#include "missmass/distribution.hpp"
#include "missmass/missing_mass.hpp"

using namespace missmass;

namespace {

// independent oracle: gamma - 1 = 2 ln(gamma/eps), by bisection on (2, 400)
double gamma_bisect(double eps) {
  auto s = [eps](double g) { return g - 1.0 - 2.0 * std::log(g / eps); };
  double lo = 2.0, hi = 400.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (s(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("gamma_eps matches the stationarity oracle") {
  CHECK(gamma_eps(0.1) == doctest::Approx(10.26).epsilon(1e-3));
  CHECK(gamma_eps(0.3) == doctest::Approx(7.41).epsilon(1e-3));
  for (double eps : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const double g = gamma_eps(eps);
    CHECK(g == doctest::Approx(gamma_bisect(eps)).epsilon(1e-10));
    CHECK(std::fabs(g - 1.0 - 2.0 * std::log(g / eps)) < 1e-9);
    CHECK(g > 2.0);
  }
  CHECK_THROWS_AS(gamma_eps(0.0), Error);
  CHECK_THROWS_AS(gamma_eps(1.0), Error);
  CHECK_THROWS_AS(gamma_eps(-0.3), Error);
}

TEST_CASE("gamma_eps is decreasing in eps") {
  double prev = gamma_eps(1e-4);
  for (double eps = 0.01; eps < 1.0; eps += 0.01) {
    const double cur = gamma_eps(eps);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("c_eps values and crossover ratios") {
  CHECK(c_eps(0.1) == doctest::Approx(0.0528).epsilon(2e-3));
  CHECK(c_eps(0.045) / 0.045 == doctest::Approx(1.00).epsilon(0.01));
  CHECK(c_eps(0.021) / 0.021 == doctest::Approx(1.89).epsilon(0.01));
  for (double eps : {1e-4, 0.01, 0.1, 0.5, 0.9}) CHECK(c_eps(eps) > 0.0);
}

TEST_CASE("c_general reduces to c_eps at the optimizing gamma") {
  for (double eps : {1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.9, 0.99}) {
    const double g = gamma_eps(eps);
    CHECK(c_general(g, eps) ==
          doctest::Approx(c_eps(eps)).epsilon(1e-12));
  }
  // vanishing limits
  CHECK(c_general(1.0 + 1e-9, 1e-10) < 1e-15);
  CHECK(c_general(150.0, 0.5) < c_general(gamma_eps(0.5), 0.5));
  CHECK_THROWS_AS(c_general(0.9, 0.5), Error);   // gamma below 1
  CHECK_THROWS_AS(c_general(1.2, 0.9), Error);   // gamma below e*eps
}

TEST_CASE("optimize_gamma agrees with the closed form") {
  for (double eps : {1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const double num = optimize_gamma(eps);
    const double cls = gamma_eps(eps);
    CHECK(std::fabs(num - cls) / cls < 1e-6);
  }
  CHECK(optimize_gamma(0.1) == doctest::Approx(10.26).epsilon(1e-3));
}

TEST_CASE("optimizer value dominates random admissible gammas") {
  const double eps = 0.2;
  const double star = optimize_gamma(eps);
  const double best = c_general(star, eps);
  for (int i = 1; i <= 100; ++i) {
    const double g = 2.0 + 1e-6 + (150.0 - 2.0) * i / 101.0;
    CHECK(best >= c_general(g, eps) - 1e-15);
  }
}

TEST_CASE("c_general: concave around the optimum, unimodal globally") {
  // The second difference is negative through the stationary point; far past
  // it the gamma^2*ln(gamma) term flips the sign, so concavity is local.
  const double h = 0.05;
  for (double eps : {0.05, 0.1, 0.3}) {
    const double star = gamma_eps(eps);
    for (double g = 2.5; g <= star + 2.0; g += 0.25) {
      const double second =
          c_general(g + h, eps) - 2.0 * c_general(g, eps) + c_general(g - h, eps);
      CHECK(second < 0.0);
    }
    // unimodal: increasing before gamma_eps, decreasing after
    for (double g = 2.5; g + 0.5 < star; g += 0.25)
      CHECK(c_general(g, eps) < c_general(g + 0.5, eps));
    for (double g = star + 0.5; g < 200.0; g += 2.0)
      CHECK(c_general(g, eps) > c_general(g + 2.0, eps));
  }
}

TEST_CASE("missing_mass_bound fills the documented result") {
  const auto r = missing_mass_bound(0.1, 100, BoundSide::upper);
  CHECK(r.exponent == doctest::Approx(0.528).epsilon(2e-3));
  CHECK(r.bound == doctest::Approx(0.59).epsilon(2e-3));
  CHECK(r.n_min == 10);
  CHECK(r.domain_ok);

  const auto low = missing_mass_bound(0.1, 9, BoundSide::lower);
  CHECK_FALSE(low.domain_ok);
  CHECK(low.n_min == 10);

  const auto two = missing_mass_bound(0.1, 1, BoundSide::two_sided);
  CHECK(two.bound == 1.0);  // capped
  const auto two_big = missing_mass_bound(0.1, 1000, BoundSide::two_sided);
  CHECK(two_big.bound ==
        doctest::Approx(2.0 * missing_mass_bound(0.1, 1000, BoundSide::upper).bound));
  CHECK(two_big.bound < 1.0);
}

TEST_CASE("huge n: exponent stays finite while the bound underflows") {
  const auto r = missing_mass_bound(0.1, 1000000000ull, BoundSide::upper);
  CHECK(std::isfinite(r.exponent));
  CHECK(r.exponent == doctest::Approx(r.c * 1e9 * 0.1));
  CHECK(r.bound == 0.0);
  CHECK(r.domain_ok);
}

TEST_CASE("min_sample_size is ceil(gamma)-1 and non-increasing") {
  CHECK(min_sample_size(0.1) == 10);
  CHECK(min_sample_size(0.3) == 7);
  std::uint64_t prev = min_sample_size(0.01);
  for (double eps = 0.02; eps < 1.0; eps += 0.01) {
    const std::uint64_t cur = min_sample_size(eps);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("compensation_gap_bound equals eps/gamma_eps") {
  CHECK(compensation_gap_bound(0.1) == doctest::Approx(0.1 / 10.26).epsilon(1e-3));
  for (double eps = 0.01; eps < 1.0; eps += 0.01) {
    const double gap = compensation_gap_bound(eps);
    CHECK(gap == doctest::Approx(eps / gamma_eps(eps)).epsilon(1e-12));
    CHECK(gap < eps);
  }
  // ratio gap/eps = 1/gamma_eps decreases (logarithmically) as eps -> 0
  double prev = compensation_gap_bound(0.5) / 0.5;
  for (double eps : {0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double cur = compensation_gap_bound(eps) / eps;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("bernstein_bound arithmetic") {
  CHECK(bernstein_bound(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-0.375)).epsilon(1e-14));
  CHECK(bernstein_bound(1.0, 1.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bernstein_bound(0.0, 2.0, 0.5) ==
        doctest::Approx(std::exp(-3.0 * 0.5 / (2.0 * 2.0))).epsilon(1e-14));
  CHECK_THROWS_AS(bernstein_bound(-1.0, 1.0, 1.0), Error);
}

TEST_CASE("variance_proxy_bound value and domain") {
  const double eps = 0.1;
  const double g = gamma_eps(eps);
  const double theta = std::log(g / eps);
  const double v = variance_proxy_bound(theta, 100, eps);
  CHECK(v == doctest::Approx((theta / 100.0) * (eps / g)).epsilon(1e-12));
  CHECK(v < (theta / 100.0) * eps);
  CHECK_THROWS_AS(variance_proxy_bound(0.5, 100, 0.1), Error);   // theta <= 1
  CHECK_THROWS_AS(variance_proxy_bound(150.0, 100, 0.1), Error); // theta >= n
  CHECK_THROWS_AS(variance_proxy_bound(1.5, 100, 0.1), Error);   // e^-theta >= eps
}

TEST_CASE("bounds dominate the exact deviation probabilities at small scale") {
  // noise-free check on oracle-sized supports, both tails plus the doubled
  // two-sided form
  for (const auto& d : {make_family(Family::uniform, 8),
                        make_family(Family::zipf, 8, 1.0),
                        make_family(Family::spike, 8, 0.5)}) {
    for (double eps : {0.15, 0.2, 0.3}) {
      const std::uint64_t n_min = min_sample_size(eps);
      for (std::uint64_t n = n_min; n <= 3 * n_min; n += 3) {
        const auto up = exact_deviation_prob(d, n, eps, Side::upper);
        const auto low = exact_deviation_prob(d, n, eps, Side::lower);
        CHECK(up.estimate <= missing_mass_bound(eps, n, BoundSide::upper).bound);
        CHECK(low.estimate <= missing_mass_bound(eps, n, BoundSide::lower).bound);
        CHECK(up.estimate + low.estimate <=
              missing_mass_bound(eps, n, BoundSide::two_sided).bound);
      }
    }
  }
}

TEST_CASE("crossover reproduces both comparator intersections") {
  const double up = crossover({1.0, BoundSide::upper, "eps^2 comparator"});
  CHECK(up > 0.043);
  CHECK(up < 0.047);
  const double low = crossover({1.89, BoundSide::lower, "eps^2 comparator"});
  CHECK(low > 0.019);
  CHECK(low < 0.023);

  // stronger comparators push the crossover toward zero
  double prev = crossover({1.0, BoundSide::upper, ""});
  for (double a : {5.0, 25.0, 125.0}) {
    const double cur = crossover({a, BoundSide::upper, ""});
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(crossover({0.05, BoundSide::upper, ""}), Error);  // nothing to cross
  CHECK_THROWS_AS(crossover({-1.0, BoundSide::upper, ""}), Error);
}
