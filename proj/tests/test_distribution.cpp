#include <doctest.h>

#include <cmath>
#include <vector>

#include "missmass/distribution.hpp"
#include "missmass/rng.hpp"

using namespace missmass;

TEST_CASE("make_distribution accepts normalized weights") {
  const auto d = make_distribution({0.5, 0.5});
  CHECK(d.size() == 2);
  CHECK(d.weights()[0] == doctest::Approx(0.5));

  const auto d3 = make_distribution({0.2, 0.3, 0.5});
  CHECK(d3.size() == 3);
  CHECK(d3.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("make_distribution renormalizes rounding noise only") {
  const auto d = make_distribution({0.25 + 1e-8, 0.75});
  CHECK(std::fabs(d.total_mass() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(make_distribution({0.2, -0.1, 0.9}), Error);
  CHECK_THROWS_WITH_AS(make_distribution({0.2, 0.3}), doctest::Contains("SumTooFarFromOne"),
                       Error);
  CHECK_THROWS_AS(make_distribution({}), Error);
  try {
    make_distribution({0.2, -0.1, 0.9});
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_weight);
  }
}

TEST_CASE("make_family constructs the documented shapes") {
  const auto u = make_family(Family::uniform, 4);
  for (double w : u.weights()) CHECK(w == doctest::Approx(0.25));

  // zipf s=1 on 3 bins: normalize 1, 1/2, 1/3
  const auto z = make_family(Family::zipf, 3, 1.0);
  CHECK(z.weights()[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-14));
  CHECK(z.weights()[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
  CHECK(z.weights()[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-14));

  const auto s = make_family(Family::spike, 3, 0.9);
  CHECK(s.weights()[0] == doctest::Approx(0.9));
  CHECK(s.weights()[1] == doctest::Approx(0.05));
  CHECK(s.weights()[2] == doctest::Approx(0.05));

  const auto g = make_family(Family::geometric, 5, 0.5);
  CHECK(g.weights()[0] / g.weights()[1] == doctest::Approx(2.0));
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_family(Family::zipf, 3, 0.0), Error);
  CHECK_THROWS_AS(make_family(Family::geometric, 3, 1.0), Error);
  CHECK_THROWS_AS(make_family(Family::spike, 3, 1.5), Error);
  CHECK_THROWS_AS(make_family(Family::uniform, 0), Error);
}

TEST_CASE("coarse_bin sums group weights") {
  const auto d = make_distribution({0.2, 0.3, 0.5});
  const auto c = coarse_bin(d, PartitionSpec{{{0, 1}, {2}}});
  REQUIRE(c.size() == 2);
  CHECK(c.weights()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.weights()[1] == doctest::Approx(0.5).epsilon(1e-14));

  // identity partition
  const auto id = coarse_bin(d, PartitionSpec{{{0}, {1}, {2}}});
  CHECK(id.weights() == d.weights());

  const auto u10 = make_family(Family::uniform, 10);
  const auto halves =
      coarse_bin(u10, PartitionSpec{{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}});
  CHECK(halves.weights()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(halves.weights()[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coarse_bin validates the partition") {
  const auto d = make_distribution({0.2, 0.3, 0.5});
  CHECK_THROWS_AS(coarse_bin(d, PartitionSpec{{{0, 1}}}), Error);          // not covering
  CHECK_THROWS_AS(coarse_bin(d, PartitionSpec{{{0, 1}, {1, 2}}}), Error);  // overlap
  CHECK_THROWS_AS(coarse_bin(d, PartitionSpec{{{0, 1, 2, 3}}}), Error);    // out of range
  CHECK_THROWS_AS(coarse_bin(d, PartitionSpec{{{0, 1, 2}, {}}}), Error);   // empty group
}

TEST_CASE("coarse_bin output is a valid distribution on random inputs") {
  Engine eng = make_stream(7, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(uniform_index(eng, 15));
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& x : w) s += (x = uniform01(eng) + 1e-3);
    for (auto& x : w) x /= s;
    const auto d = make_distribution(w);

    PartitionSpec spec;
    std::vector<std::size_t> cur;
    for (std::size_t i = 0; i < n; ++i) {
      cur.push_back(i);
      if (uniform01(eng) < 0.4 || i + 1 == n) {
        spec.groups.push_back(cur);
        cur.clear();
      }
    }
    const auto c = coarse_bin(d, spec);
    CHECK(std::fabs(c.total_mass() - 1.0) <= 1e-12);
    for (double x : c.weights()) CHECK(x > 0.0);
  }
}

TEST_CASE("subdistribution flag relaxes the unit-sum invariant") {
  const DiscreteDistribution sub({0.2, 0.25, 0.05}, {}, true);
  CHECK(sub.total_mass() == doctest::Approx(0.5));
  CHECK(sub.is_subdistribution());
  CHECK_THROWS_AS(DiscreteDistribution({0.2, 0.25, 0.05}), Error);
  CHECK_THROWS_AS(DiscreteDistribution({0.7, 0.7}, {}, true), Error);  // > 1
}
