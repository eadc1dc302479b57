#include <doctest.h>

#include <cmath>
#include <vector>

#include "missmass/distribution.hpp"
#include "missmass/na_checks.hpp"
#include "missmass/rng.hpp"

using namespace missmass;

namespace {

// enumeration oracle over all N^n samples: Cov(C_i, C_j)
double count_cov_enumerate(const DiscreteDistribution& dist, std::uint64_t n,
                           std::size_t i, std::size_t j) {
  const std::size_t N = dist.size();
  std::vector<std::size_t> draw(n, 0);
  double e_ij = 0.0, e_i = 0.0, e_j = 0.0;
  bool done = n == 0;
  while (!done) {
    double p = 1.0;
    double ci = 0.0, cj = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      p *= dist.weights()[draw[t]];
      ci += draw[t] == i ? 1.0 : 0.0;
      cj += draw[t] == j ? 1.0 : 0.0;
    }
    e_ij += p * ci * cj;
    e_i += p * ci;
    e_j += p * cj;
    std::size_t k = 0;
    while (k < n && ++draw[k] == N) draw[k++] = 0;
    done = (k == n);
  }
  return e_ij - e_i * e_j;
}

}  // namespace

TEST_CASE("occupancy covariance closed form") {
  const auto u2 = make_family(Family::uniform, 2);
  CHECK(occupancy_cov_exact(u2, 1, 0, 1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(occupancy_cov_exact(u2, 0, 0, 1) == 0.0);

  // masses covering everything: first term vanishes
  const auto d = make_distribution({0.6, 0.4});
  const double c = occupancy_cov_exact(d, 30, 0, 1);
  CHECK(c == doctest::Approx(-std::pow(0.4, 30) * std::pow(0.6, 30)).epsilon(1e-10));

  CHECK_THROWS_AS(occupancy_cov_exact(u2, 3, 0, 0), Error);
  CHECK_THROWS_AS(occupancy_cov_exact(u2, 3, 0, 5), Error);
}

TEST_CASE("occupancy covariance is never positive") {
  Engine eng = make_stream(83, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t N = 2 + uniform_index(eng, 20);
    std::vector<double> w(N);
    double s = 0.0;
    for (auto& x : w) s += (x = -std::log(uniform01(eng) + 1e-300));
    for (auto& x : w) x /= s;
    const auto d = make_distribution(w);
    const std::uint64_t n = 1 + uniform_index(eng, 100);
    const std::size_t i = uniform_index(eng, N);
    std::size_t j = uniform_index(eng, N);
    if (j == i) j = (j + 1) % N;
    CHECK(occupancy_cov_exact(d, n, i, j) <= 1e-15);
  }
}

TEST_CASE("count covariance matches full enumeration for N=3") {
  const auto u3 = make_family(Family::uniform, 3);
  CHECK(count_cov_exact(u3, 4, 0, 1) == doctest::Approx(-4.0 / 9.0).epsilon(1e-14));
  CHECK(count_cov_exact(u3, 0, 0, 1) == 0.0);

  const auto z3 = make_family(Family::zipf, 3, 1.0);
  for (std::uint64_t n = 2; n <= 5; ++n) {
    CHECK(count_cov_exact(u3, n, 0, 1) ==
          doctest::Approx(count_cov_enumerate(u3, n, 0, 1)).epsilon(1e-12));
    CHECK(count_cov_exact(z3, n, 0, 2) ==
          doctest::Approx(count_cov_enumerate(z3, n, 0, 2)).epsilon(1e-12));
    CHECK(count_cov_exact(z3, n, 1, 2) ==
          doctest::Approx(count_cov_enumerate(z3, n, 1, 2)).epsilon(1e-12));
  }
}

TEST_CASE("na_monotone_test: sum/sum singletons recover the count covariance") {
  const auto u3 = make_family(Family::uniform, 3);
  const auto rep = na_monotone_test(u3, 4, {0}, {1}, {MonotoneFnKind::sum},
                                    {MonotoneFnKind::sum}, 200000, 6);
  REQUIRE(rep.exact_cov.has_value());
  CHECK(*rep.exact_cov == doctest::Approx(-4.0 / 9.0).epsilon(1e-14));
  CHECK(rep.empirical_cov == doctest::Approx(-4.0 / 9.0).epsilon(0.05));
  CHECK(rep.ci_low <= *rep.exact_cov);
  CHECK(rep.ci_high >= *rep.exact_cov);
  CHECK(rep.verdict == Verdict::consistent);
  REQUIRE(rep.pair.has_value());
  CHECK(rep.pair->first == 0);
  CHECK(rep.pair->second == 1);
}

TEST_CASE("na_monotone_test: indicator functions on zipf halves") {
  const auto z = make_family(Family::zipf, 10, 1.0);
  const std::vector<std::size_t> a{0, 1, 2, 3, 4}, b{5, 6, 7, 8, 9};
  const double na = 50.0 * (z.weights()[0] + z.weights()[1] + z.weights()[2] +
                            z.weights()[3] + z.weights()[4]);
  const auto rep = na_monotone_test(z, 50, a, b,
                                    {MonotoneFnKind::indicator_above, na},
                                    {MonotoneFnKind::indicator_above, 5.0}, 100000, 9);
  CHECK(rep.verdict == Verdict::consistent);
  CHECK(rep.empirical_cov <= rep.ci_high);
}

TEST_CASE("na_monotone_test: max over disjoint sets stays consistent") {
  const auto g = make_family(Family::geometric, 8, 0.6);
  const auto rep = na_monotone_test(g, 30, {0, 2}, {1, 3}, {MonotoneFnKind::max},
                                    {MonotoneFnKind::max}, 100000, 11);
  CHECK(rep.verdict == Verdict::consistent);
}

TEST_CASE("na_monotone_test validates the sets") {
  const auto u3 = make_family(Family::uniform, 3);
  CHECK_THROWS_AS(na_monotone_test(u3, 4, {0, 1}, {1}, {}, {}, 100, 1), Error);
  CHECK_THROWS_AS(na_monotone_test(u3, 4, {0}, {7}, {}, {}, 100, 1), Error);
  try {
    na_monotone_test(u3, 4, {0, 1}, {1}, {}, {}, 100, 1);
  } catch (const Error& e) {
    CHECK(e.code() == errc::overlapping_sets);
  }
}

TEST_CASE("na_monotone_test is deterministic in the seed") {
  const auto u4 = make_family(Family::uniform, 4);
  const auto a = na_monotone_test(u4, 6, {0}, {2}, {MonotoneFnKind::sum},
                                  {MonotoneFnKind::sum}, 50000, 17);
  const auto b = na_monotone_test(u4, 6, {0}, {2}, {MonotoneFnKind::sum},
                                  {MonotoneFnKind::sum}, 50000, 17);
  CHECK(a.empirical_cov == b.empirical_cov);
  CHECK(a.ci_low == b.ci_low);
}
