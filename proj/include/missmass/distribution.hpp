#pragma once
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "missmass/errors.hpp"

namespace missmass {

// Finite discrete distribution: positive weights w_i, sum 1 (or <= 1 for the
// sub-distribution outputs of the thresholding transforms, which may carry
// less than unit mass by construction).
class DiscreteDistribution {
public:
  explicit DiscreteDistribution(std::vector<double> weights,
                                std::vector<std::string> labels = {},
                                bool subdistribution = false)
      : weights_(std::move(weights)),
        labels_(std::move(labels)),
        subdistribution_(subdistribution) {
    if (weights_.empty()) fail(errc::bad_param, "distribution needs at least one weight");
    if (!labels_.empty() && labels_.size() != weights_.size())
      fail(errc::bad_param, "labels/weights length mismatch");
    long double sum = 0.0L;
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w))
        fail(errc::non_positive_weight, "weight " + std::to_string(w));
      sum += w;
    }
    total_mass_ = static_cast<double>(sum);
    const double err = static_cast<double>(sum - 1.0L);
    if (subdistribution_) {
      if (err > 1e-12)
        fail(errc::sum_too_far_from_one, "sub-distribution mass exceeds 1 by " + std::to_string(err));
    } else if (std::fabs(err) > 1e-12) {
      fail(errc::sum_too_far_from_one, "weights sum to " + std::to_string(total_mass_));
    }
  }

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t i) const { return weights_.at(i); }
  double total_mass() const noexcept { return total_mass_; }
  bool is_subdistribution() const noexcept { return subdistribution_; }

  double max_weight() const {
    double m = 0.0;
    for (double w : weights_) m = std::max(m, w);
    return m;
  }

private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
  bool subdistribution_ = false;
  double total_mass_ = 0.0;
};

// Builds a unit-mass distribution from raw positive weights. Accepts inputs
// whose sum is within 1e-6 of 1 (rounding noise) and renormalizes; anything
// further off is rejected as unnormalized garbage.
inline DiscreteDistribution make_distribution(std::vector<double> weights,
                                              std::vector<std::string> labels = {}) {
  if (weights.empty()) fail(errc::bad_param, "empty weight list");
  long double sum = 0.0L;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      fail(errc::non_positive_weight, "weight " + std::to_string(w));
    sum += w;
  }
  if (std::fabs(static_cast<double>(sum - 1.0L)) > 1e-6)
    fail(errc::sum_too_far_from_one,
         "weights sum to " + std::to_string(static_cast<double>(sum)));
  for (double& w : weights) w = static_cast<double>(w / sum);
  return DiscreteDistribution(std::move(weights), std::move(labels));
}

enum class Family { uniform, zipf, geometric, spike };

// Synthetic test families. zipf: w_i proportional to i^-s; geometric: w_i
// proportional to r^i; spike: one bin of mass m, the rest uniform.
inline DiscreteDistribution make_family(Family kind, std::size_t n, double param = 0.0) {
  if (n < 1) fail(errc::bad_param, "family size must be >= 1");
  std::vector<double> w(n);
  switch (kind) {
    case Family::uniform: {
      for (auto& x : w) x = 1.0 / static_cast<double>(n);
      break;
    }
    case Family::zipf: {
      if (!(param > 0.0)) fail(errc::bad_param, "zipf exponent must be > 0");
      long double sum = 0.0L;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::pow(static_cast<double>(i + 1), -param);
        sum += w[i];
      }
      for (auto& x : w) x = static_cast<double>(x / sum);
      break;
    }
    case Family::geometric: {
      if (!(param > 0.0) || !(param < 1.0))
        fail(errc::bad_param, "geometric ratio must be in (0,1)");
      long double sum = 0.0L;
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        p *= param;
        w[i] = p;
        sum += p;
      }
      for (auto& x : w) x = static_cast<double>(x / sum);
      break;
    }
    case Family::spike: {
      if (!(param > 0.0) || !(param < 1.0))
        fail(errc::bad_param, "spike mass must be in (0,1)");
      if (n < 2) fail(errc::bad_param, "spike needs at least 2 bins");
      w[0] = param;
      const double rest = (1.0 - param) / static_cast<double>(n - 1);
      for (std::size_t i = 1; i < n; ++i) w[i] = rest;
      break;
    }
  }
  return DiscreteDistribution(std::move(w));
}

// Partition of the index set {0..N-1} into non-empty disjoint covering groups.
struct PartitionSpec {
  std::vector<std::vector<std::size_t>> groups;

  void validate(std::size_t n) const {
    if (groups.empty()) fail(errc::bad_partition, "no groups");
    std::vector<char> seen(n, 0);
    std::size_t covered = 0;
    for (const auto& g : groups) {
      if (g.empty()) fail(errc::bad_partition, "empty group");
      for (std::size_t idx : g) {
        if (idx >= n) fail(errc::bad_partition, "index " + std::to_string(idx) + " out of range");
        if (seen[idx]) fail(errc::bad_partition, "index " + std::to_string(idx) + " in two groups");
        seen[idx] = 1;
        ++covered;
      }
    }
    if (covered != n) fail(errc::bad_partition, "groups do not cover the index set");
  }
};

// Coarse binning: the weight of group G is the sum of the member weights.
inline DiscreteDistribution coarse_bin(const DiscreteDistribution& dist,
                                       const PartitionSpec& spec) {
  spec.validate(dist.size());
  std::vector<double> out;
  out.reserve(spec.groups.size());
  for (const auto& g : spec.groups) {
    long double s = 0.0L;
    for (std::size_t idx : g) s += dist.weights()[idx];
    out.push_back(static_cast<double>(s));
  }
  return DiscreteDistribution(std::move(out), {}, dist.is_subdistribution());
}

}  // namespace missmass
