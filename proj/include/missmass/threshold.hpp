#pragma once
/*
Threshold transforms that regulate bin heterogeneity before a Bernstein step.

Given theta in (0, n), set tau = theta/n and tau' = 2*theta/n. split() cuts
every bin w >= tau into k pieces with k*tau <= w < (k+1)*tau: the first k-1
pieces are exactly tau and the last lies in [tau, 2*tau). absorb() then
removes sub-tau bins by repeatedly spreading the largest one over the other
sub-tau bins, and folds the final leftover into a mid-range bin, leaving
surviving bins in [tau, tau') whenever an exact-tau piece hosts the leftover
(split outputs with a cut bin always have one). Both transforms conserve
total mass.
*/
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"

namespace missmass {

struct ThresholdPartition {
  double theta = 0.0;
  std::uint64_t n = 0;
  double tau = 0.0;
  double tau_prime = 0.0;
  std::vector<std::size_t> below;  // w <  tau
  std::vector<std::size_t> mid;    // tau <= w < tau'
  std::vector<std::size_t> above;  // w >= tau'
};

namespace detail {

inline void check_theta(double theta, std::uint64_t n) {
  if (!(theta > 0.0) || !(theta < static_cast<double>(n)) || !std::isfinite(theta))
    fail(errc::theta_out_of_range,
         "theta=" + std::to_string(theta) + " requires 0 < theta < n=" + std::to_string(n));
}

// floor(w/tau) with a 1-ulp guard: w exactly equal to k*tau yields k, not k-1.
inline std::size_t piece_count(double w, double tau) {
  const double r = w / tau;
  double k = std::floor(r);
  if ((k + 1.0) - r <= r * 4.0 * std::numeric_limits<double>::epsilon()) k += 1.0;
  return static_cast<std::size_t>(std::max(1.0, k));
}

}  // namespace detail

inline ThresholdPartition partition_by_threshold(const DiscreteDistribution& dist,
                                                 double theta, std::uint64_t n) {
  detail::check_theta(theta, n);
  ThresholdPartition part;
  part.theta = theta;
  part.n = n;
  part.tau = theta / static_cast<double>(n);
  part.tau_prime = 2.0 * part.tau;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double w = dist.weights()[i];
    if (w < part.tau)
      part.below.push_back(i);
    else if (w < part.tau_prime)
      part.mid.push_back(i);
    else
      part.above.push_back(i);
  }
  return part;
}

// Splits every bin >= tau into tau-sized pieces; bins below tau pass through.
// Output bins are all < tau' and the total mass is unchanged.
inline DiscreteDistribution split(const DiscreteDistribution& dist, double theta,
                                  std::uint64_t n) {
  detail::check_theta(theta, n);
  const double tau = theta / static_cast<double>(n);
  std::vector<double> out;
  std::vector<std::string> labels;
  const bool keep_labels = !dist.labels().empty();
  out.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double w = dist.weights()[i];
    if (w < tau) {
      out.push_back(w);
      if (keep_labels) labels.push_back(dist.labels()[i]);
      continue;
    }
    const std::size_t k = detail::piece_count(w, tau);
    for (std::size_t j = 0; j + 1 < k; ++j) {
      out.push_back(tau);
      if (keep_labels) labels.push_back(dist.labels()[i] + "#" + std::to_string(j));
    }
    out.push_back(w - static_cast<double>(k - 1) * tau);
    if (keep_labels) labels.push_back(dist.labels()[i] + "#" + std::to_string(k - 1));
  }
  return DiscreteDistribution(std::move(out), std::move(labels), dist.is_subdistribution());
}

// Absorbs sub-tau bins of an already-split distribution (no bin >= tau').
// Repeatedly spreads the largest sub-tau bin over the remaining sub-tau bins
// (ties broken toward the lowest index); a bin pushed to >= tau leaves the
// pool. A final sub-tau leftover is added to a mid bin of size exactly tau
// when one exists, else to the smallest mid bin.
inline DiscreteDistribution absorb(const DiscreteDistribution& dist, double theta,
                                   std::uint64_t n) {
  detail::check_theta(theta, n);
  const double tau = theta / static_cast<double>(n);
  const double tau_prime = 2.0 * tau;
  std::vector<double> w = dist.weights();
  for (double x : w)
    if (x >= tau_prime)
      fail(errc::not_split, "bin of mass " + std::to_string(x) + " >= tau'");

  std::vector<char> alive(w.size(), 1);
  auto sub_tau_bins = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (alive[i] && w[i] < tau) idx.push_back(i);
    return idx;
  };

  for (auto pool = sub_tau_bins(); pool.size() >= 2; pool = sub_tau_bins()) {
    std::size_t j = pool[0];
    for (std::size_t i : pool)
      if (w[i] > w[j]) j = i;
    const double share = w[j] / static_cast<double>(pool.size() - 1);
    for (std::size_t i : pool)
      if (i != j) w[i] += share;
    alive[j] = 0;
  }

  const auto leftover = sub_tau_bins();
  if (!leftover.empty()) {
    std::size_t target = w.size();
    std::size_t smallest_mid = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!alive[i] || i == leftover[0] || w[i] < tau) continue;
      if (w[i] == tau) {
        target = i;
        break;
      }
      if (smallest_mid == w.size() || w[i] < w[smallest_mid]) smallest_mid = i;
    }
    if (target == w.size()) target = smallest_mid;
    if (target == w.size())
      fail(errc::no_mid_bin, "no bin in [tau, tau') to absorb the residual into");
    w[target] += w[leftover[0]];
    alive[leftover[0]] = 0;
  }

  std::vector<double> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    if (alive[i]) out.push_back(w[i]);
  return DiscreteDistribution(std::move(out), {}, dist.is_subdistribution());
}

}  // namespace missmass
