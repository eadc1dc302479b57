#pragma once
/*
Negative-association checks for multinomial occupancy.

Closed forms, for distinct bins i != j and sample size n:
  Cov(Y_i, Y_j) = (1 - w_i - w_j)^n - (1-w_i)^n (1-w_j)^n   (occupancy, <= 0)
  Cov(C_i, C_j) = -n * w_i * w_j                            (counts)

na_monotone_test estimates Cov(f(C_A), g(C_B)) for disjoint index sets and
coordinate-wise non-decreasing f, g from a fixed catalog, with a 99%
normal-approximation CI on the covariance. Negative association predicts
covariance <= 0, so only a CI strictly above zero counts as a violation.
*/
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"
#include "missmass/missing_mass.hpp"
#include "missmass/rng.hpp"

namespace missmass {

enum class MonotoneFnKind { sum, max, indicator_above };

inline const char* monotone_fn_name(MonotoneFnKind k) {
  switch (k) {
    case MonotoneFnKind::sum: return "sum";
    case MonotoneFnKind::max: return "max";
    case MonotoneFnKind::indicator_above: return "indicator_above";
  }
  return "?";
}

struct MonotoneFn {
  MonotoneFnKind kind = MonotoneFnKind::sum;
  double threshold = 0.0;  // used by indicator_above only

  double apply(const std::vector<std::uint32_t>& counts,
               const std::vector<std::size_t>& idx) const {
    switch (kind) {
      case MonotoneFnKind::sum: {
        double s = 0.0;
        for (std::size_t i : idx) s += counts[i];
        return s;
      }
      case MonotoneFnKind::max: {
        double m = 0.0;
        for (std::size_t i : idx) m = std::max(m, static_cast<double>(counts[i]));
        return m;
      }
      case MonotoneFnKind::indicator_above: {
        double s = 0.0;
        for (std::size_t i : idx) s += counts[i];
        return s >= threshold ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }
};

enum class Verdict { consistent, violation };

struct NAReport {
  std::vector<std::size_t> set_a, set_b;
  MonotoneFn f, g;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // set when both singletons
  std::optional<double> exact_cov;                          // known for sum/sum
  double empirical_cov = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  Verdict verdict = Verdict::consistent;
};

inline double occupancy_cov_exact(const DiscreteDistribution& dist, std::uint64_t n,
                                  std::size_t i, std::size_t j) {
  if (i >= dist.size() || j >= dist.size())
    fail(errc::index_out_of_range, "bin index out of range");
  if (i == j) fail(errc::requires_distinct, "occupancy covariance needs i != j");
  const double wi = dist.weights()[i], wj = dist.weights()[j];
  return occupancy_prob(std::min(wi + wj, 1.0), n) -
         occupancy_prob(wi, n) * occupancy_prob(wj, n);
}

inline double count_cov_exact(const DiscreteDistribution& dist, std::uint64_t n,
                              std::size_t i, std::size_t j) {
  if (i >= dist.size() || j >= dist.size())
    fail(errc::index_out_of_range, "bin index out of range");
  if (i == j) fail(errc::requires_distinct, "count covariance needs i != j");
  return -static_cast<double>(n) * dist.weights()[i] * dist.weights()[j];
}

inline NAReport na_monotone_test(const DiscreteDistribution& dist, std::uint64_t n,
                                 std::vector<std::size_t> set_a,
                                 std::vector<std::size_t> set_b, MonotoneFn f,
                                 MonotoneFn g, std::uint64_t trials,
                                 std::uint64_t seed) {
  if (trials < 2) fail(errc::bad_param, "na_monotone_test needs trials >= 2");
  for (std::size_t i : set_a)
    if (i >= dist.size()) fail(errc::index_out_of_range, "set A index out of range");
  for (std::size_t j : set_b) {
    if (j >= dist.size()) fail(errc::index_out_of_range, "set B index out of range");
    for (std::size_t i : set_a)
      if (i == j) fail(errc::overlapping_sets, "sets A and B must be disjoint");
  }

  const AliasSampler alias(dist.weights());
  std::vector<std::uint32_t> counts(dist.size(), 0);
  std::vector<double> us(trials), vs(trials);
  constexpr std::uint64_t kChunk = 1u << 16;
  std::uint64_t t = 0;
  const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    Engine eng = make_stream(seed, c);
    const std::uint64_t hi = std::min(trials, (c + 1) * kChunk);
    for (; t < hi; ++t) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::uint64_t d = 0; d < n; ++d) ++counts[alias.draw(eng)];
      us[t] = f.apply(counts, set_a);
      vs[t] = g.apply(counts, set_b);
    }
  }

  long double mu = 0.0L, mv = 0.0L;
  for (std::uint64_t i = 0; i < trials; ++i) {
    mu += us[i];
    mv += vs[i];
  }
  const double ubar = static_cast<double>(mu) / trials;
  const double vbar = static_cast<double>(mv) / trials;
  long double cov_acc = 0.0L, sq_acc = 0.0L;
  for (std::uint64_t i = 0; i < trials; ++i)
    cov_acc += (us[i] - ubar) * (vs[i] - vbar);
  const double cov = static_cast<double>(cov_acc) / trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const double d = (us[i] - ubar) * (vs[i] - vbar) - cov;
    sq_acc += d * d;
  }
  const double se = std::sqrt(static_cast<double>(sq_acc) / trials /
                              static_cast<double>(trials));
  constexpr double z995 = 2.5758293035489004;  // 99.5% normal quantile

  NAReport rep;
  rep.set_a = std::move(set_a);
  rep.set_b = std::move(set_b);
  rep.f = f;
  rep.g = g;
  if (rep.set_a.size() == 1 && rep.set_b.size() == 1)
    rep.pair = std::make_pair(rep.set_a[0], rep.set_b[0]);
  if (f.kind == MonotoneFnKind::sum && g.kind == MonotoneFnKind::sum) {
    double wa = 0.0, wb = 0.0;
    for (std::size_t i : rep.set_a) wa += dist.weights()[i];
    for (std::size_t j : rep.set_b) wb += dist.weights()[j];
    rep.exact_cov = -static_cast<double>(n) * wa * wb;
  }
  rep.empirical_cov = cov;
  rep.ci_low = cov - z995 * se;
  rep.ci_high = cov + z995 * se;
  rep.trials = trials;
  rep.verdict = (rep.ci_low > 0.0) ? Verdict::violation : Verdict::consistent;
  return rep;
}

}  // namespace missmass
