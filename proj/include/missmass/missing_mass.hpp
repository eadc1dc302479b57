#pragma once
/*
The missing mass Y = sum_i w_i * Y_i of an i.i.d. sample of size n, where
Y_i indicates that bin i was never drawn. Closed moments:
  E[Y]    = sum_i w_i * (1-w_i)^n
  V[Y]    = sum_i w_i^2 * var[Y_i]      (Bernstein variance proxy)
  sigma^2 = sum_i w_i   * var[Y_i]      (weighted variance)
with var[Y_i] = q_i*(1-q_i), q_i = (1-w_i)^n.

Two sampling models are supported: the true multinomial occupancy process,
and the independent-Bernoulli surrogate in which each Y_i ~ Bern(q_i)
independently. The exact small-support oracle (N <= 20) computes the full
law of Y: by subset inclusion-exclusion under the multinomial model,
  P(missing set = S) = sum_{T >= S} (-1)^{|T|-|S|} (1 - w(T))^n,
and by direct product expansion under the surrogate.
*/
#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "missmass/clopper_pearson.hpp"
#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"
#include "missmass/rng.hpp"

namespace missmass {

enum class Side { upper, lower };
enum class SamplingModel { multinomial, independent };
enum class EstimateMethod { exact, monte_carlo };

inline const char* side_name(Side s) { return s == Side::upper ? "upper" : "lower"; }

struct MissingMassStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double variance_proxy = 0.0;     // sum w_i^2 var[Y_i]
  double weighted_variance = 0.0;  // sum w_i   var[Y_i]
};

struct DeviationEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;
  std::uint64_t trials = 0;  // 0 for the exact method
  EstimateMethod method = EstimateMethod::exact;
  Side side = Side::upper;
  double epsilon = 0.0;
};

// Atom comparisons between the sampler and the exact law tolerate this much
// rounding in the missing-mass value.
inline constexpr double kEventSlack = 1e-12;

// (1 - w)^n, in log space so large n cannot underflow prematurely.
inline double occupancy_prob(double w, std::uint64_t n) {
  if (n == 0) return 1.0;
  if (w >= 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-w));
}

inline double expected_missing_mass(const DiscreteDistribution& dist, std::uint64_t n) {
  long double acc = 0.0L;
  for (double w : dist.weights()) acc += w * occupancy_prob(w, n);
  return static_cast<double>(acc);
}

inline MissingMassStats missing_mass_stats(const DiscreteDistribution& dist,
                                           std::uint64_t n) {
  if (n < 1) fail(errc::bad_param, "stats require n >= 1");
  MissingMassStats s;
  s.n = n;
  long double mean = 0.0L, vproxy = 0.0L, wvar = 0.0L;
  for (double w : dist.weights()) {
    const double q = occupancy_prob(w, n);
    const double var = q * (1.0 - q);
    mean += w * q;
    vproxy += w * w * var;
    wvar += w * var;
  }
  s.mean = static_cast<double>(mean);
  s.variance_proxy = static_cast<double>(vproxy);
  s.weighted_variance = static_cast<double>(wvar);
  return s;
}

// Full law of Y on a small support, as sorted (value, probability) atoms.
struct ExactDistribution {
  std::vector<std::pair<double, double>> atoms;

  double mean() const {
    long double m = 0.0L;
    for (const auto& [v, p] : atoms) m += static_cast<long double>(v) * p;
    return static_cast<double>(m);
  }
  double total() const {
    long double t = 0.0L;
    for (const auto& [v, p] : atoms) t += p;
    return static_cast<double>(t);
  }
  double prob_at_least(double t) const {
    long double s = 0.0L;
    for (const auto& [v, p] : atoms)
      if (v >= t - kEventSlack) s += p;
    return static_cast<double>(s);
  }
  double prob_at_most(double t) const {
    long double s = 0.0L;
    for (const auto& [v, p] : atoms)
      if (v <= t + kEventSlack) s += p;
    return static_cast<double>(s);
  }
};

namespace detail {

// Aggregates (value, prob) pairs, merging values equal to within 1e-12 and
// clamping the inclusion-exclusion rounding dust at zero.
inline ExactDistribution aggregate_atoms(std::vector<std::pair<double, double>> raw) {
  std::sort(raw.begin(), raw.end());
  ExactDistribution out;
  std::size_t i = 0;
  while (i < raw.size()) {
    const double anchor = raw[i].first;
    long double mass = 0.0L, moment = 0.0L;
    std::size_t j = i;
    for (; j < raw.size() && raw[j].first - anchor <= 1e-12; ++j) {
      mass += raw[j].second;
      moment += static_cast<long double>(raw[j].first) * raw[j].second;
    }
    double p = static_cast<double>(mass);
    if (p < -1e-9) fail(errc::bad_param, "exact oracle produced probability " + std::to_string(p));
    if (p > 0.0) {
      const double v = static_cast<double>(moment / mass);
      out.atoms.emplace_back(v, p);
    }
    i = j;
  }
  return out;
}

}  // namespace detail

inline ExactDistribution exact_distribution(const DiscreteDistribution& dist,
                                            std::uint64_t n,
                                            SamplingModel model = SamplingModel::multinomial) {
  const std::size_t N = dist.size();
  if (N > 20)
    fail(errc::support_too_large, "exact oracle caps support at 20, got " + std::to_string(N));
  const std::size_t full = std::size_t{1} << N;
  const auto& w = dist.weights();

  // mass[S]: sum of weights in S, accumulated from the lowest set bit so the
  // rounding matches the sampler's descending-index accumulation.
  std::vector<double> mass(full, 0.0);
  for (std::size_t S = 1; S < full; ++S) {
    const unsigned b = std::countr_zero(S);
    mass[S] = mass[S & (S - 1)] + w[b];
  }

  std::vector<double> prob(full);
  if (model == SamplingModel::multinomial) {
    for (std::size_t S = 0; S < full; ++S) {
      const double m = dist.is_subdistribution() ? std::min(mass[S], 1.0) : mass[S];
      prob[S] = occupancy_prob(m, n);
    }
    // Moebius inversion over supersets turns P(missing >= S) into P(missing = S).
    for (std::size_t bit = 0; bit < N; ++bit) {
      const std::size_t b = std::size_t{1} << bit;
      for (std::size_t S = 0; S < full; ++S)
        if (!(S & b)) prob[S] -= prob[S | b];
    }
  } else {
    prob[0] = 1.0;
    std::fill(prob.begin() + 1, prob.end(), 0.0);
    for (std::size_t bit = 0; bit < N; ++bit) {
      const std::size_t b = std::size_t{1} << bit;
      const double q = occupancy_prob(w[bit], n);
      for (std::size_t S = 0; S < full; ++S) {
        if (S & b) continue;
        prob[S | b] = prob[S] * q;
        prob[S] *= 1.0 - q;
      }
    }
  }

  std::vector<std::pair<double, double>> raw(full);
  for (std::size_t S = 0; S < full; ++S) raw[S] = {mass[S], prob[S]};
  return detail::aggregate_atoms(std::move(raw));
}

inline DeviationEstimate exact_deviation_prob(const DiscreteDistribution& dist,
                                              std::uint64_t n, double epsilon, Side side,
                                              SamplingModel model = SamplingModel::multinomial) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    fail(errc::epsilon_out_of_range, "epsilon must be in (0,1)");
  const ExactDistribution law = exact_distribution(dist, n, model);
  const double mean = expected_missing_mass(dist, n);
  const double p = (side == Side::upper) ? law.prob_at_least(mean + epsilon)
                                         : law.prob_at_most(mean - epsilon);
  DeviationEstimate est;
  est.estimate = est.ci_low = est.ci_high = std::clamp(p, 0.0, 1.0);
  est.trials = 0;
  est.method = EstimateMethod::exact;
  est.side = side;
  est.epsilon = epsilon;
  return est;
}

namespace detail {

// Missing mass of one multinomial sample; `stamp`/`epoch` implement a
// reusable seen-set without clearing.
inline double sample_multinomial_mm(const std::vector<double>& w, const AliasSampler& alias,
                                    std::uint64_t n, Engine& eng,
                                    std::vector<std::uint32_t>& stamp, std::uint32_t epoch) {
  for (std::uint64_t t = 0; t < n; ++t) stamp[alias.draw(eng)] = epoch;
  double acc = 0.0;
  for (std::size_t i = w.size(); i-- > 0;)
    if (stamp[i] != epoch) acc += w[i];
  return acc;
}

inline double sample_independent_mm(const std::vector<double>& q,
                                    const std::vector<double>& w, Engine& eng) {
  double acc = 0.0;
  for (std::size_t i = w.size(); i-- > 0;)
    if (uniform01(eng) < q[i]) acc += w[i];
  return acc;
}

}  // namespace detail

namespace detail {

// Sub-distributions sample against an extra phantom bin holding the
// untracked remainder, matching the exact oracle's (1 - mass(S))^n law.
inline std::vector<double> with_remainder(const DiscreteDistribution& dist) {
  std::vector<double> w = dist.weights();
  if (dist.is_subdistribution()) {
    const double rest = 1.0 - dist.total_mass();
    if (rest > 0.0) w.push_back(rest);
  }
  return w;
}

}  // namespace detail

// One draw of the missing mass. Deterministic given the engine state.
inline double sample_missing_mass(const DiscreteDistribution& dist, std::uint64_t n,
                                  Engine& eng,
                                  SamplingModel model = SamplingModel::multinomial) {
  const auto& w = dist.weights();
  if (n == 0) return dist.total_mass();
  if (model == SamplingModel::multinomial) {
    const auto draw_w = detail::with_remainder(dist);
    AliasSampler alias(draw_w);
    std::vector<std::uint32_t> stamp(draw_w.size(), 0);
    return detail::sample_multinomial_mm(w, alias, n, eng, stamp, 1);
  }
  std::vector<double> q(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) q[i] = occupancy_prob(w[i], n);
  return detail::sample_independent_mm(q, w, eng);
}

// Monte-Carlo deviation probability with an exact Clopper-Pearson 99% CI.
// Trials are processed in fixed chunks of 2^16 with per-chunk streams derived
// from (seed, chunk), so the count is independent of the thread schedule.
inline DeviationEstimate mc_deviation_prob(const DiscreteDistribution& dist, std::uint64_t n,
                                           double epsilon, Side side, std::uint64_t trials,
                                           std::uint64_t seed,
                                           SamplingModel model = SamplingModel::multinomial) {
  if (trials < 1) fail(errc::bad_param, "trials must be >= 1");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    fail(errc::epsilon_out_of_range, "epsilon must be in (0,1)");

  const auto& w = dist.weights();
  const double mean = expected_missing_mass(dist, n);
  const double threshold = (side == Side::upper) ? mean + epsilon : mean - epsilon;
  const auto draw_w = detail::with_remainder(dist);
  const AliasSampler alias(draw_w);
  std::vector<double> q;
  if (model == SamplingModel::independent) {
    q.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) q[i] = occupancy_prob(w[i], n);
  }

  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;

  auto run_chunk = [&](std::uint64_t chunk, std::vector<std::uint32_t>& stamp,
                       std::uint32_t& epoch) -> std::uint64_t {
    Engine eng = make_stream(seed, chunk);
    const std::uint64_t lo = chunk * kChunk;
    const std::uint64_t hi = std::min(trials, lo + kChunk);
    std::uint64_t hits = 0;
    for (std::uint64_t t = lo; t < hi; ++t) {
      double y;
      if (model == SamplingModel::multinomial) {
        ++epoch;
        y = detail::sample_multinomial_mm(w, alias, n, eng, stamp, epoch);
      } else {
        y = detail::sample_independent_mm(q, w, eng);
      }
      const bool hit = (side == Side::upper) ? (y >= threshold - kEventSlack)
                                             : (y <= threshold + kEventSlack);
      hits += hit ? 1 : 0;
    }
    return hits;
  };

  std::uint64_t hits = 0;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads = static_cast<unsigned>(
      std::min<std::uint64_t>(hw, n_chunks));
  if (n_threads <= 1) {
    std::vector<std::uint32_t> stamp(draw_w.size(), 0);
    std::uint32_t epoch = 0;
    for (std::uint64_t c = 0; c < n_chunks; ++c) hits += run_chunk(c, stamp, epoch);
  } else {
    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> total_hits{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        std::vector<std::uint32_t> stamp(draw_w.size(), 0);
        std::uint32_t epoch = 0;
        std::uint64_t local = 0;
        for (std::uint64_t c = next_chunk.fetch_add(1); c < n_chunks;
             c = next_chunk.fetch_add(1))
          local += run_chunk(c, stamp, epoch);
        total_hits.fetch_add(local);
      });
    }
    for (auto& th : pool) th.join();
    hits = total_hits.load();
  }

  const ConfidenceInterval ci = clopper_pearson(hits, trials, 0.99);
  DeviationEstimate est;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.trials = trials;
  est.method = EstimateMethod::monte_carlo;
  est.side = side;
  est.epsilon = epsilon;
  return est;
}

}  // namespace missmass
