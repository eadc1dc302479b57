#pragma once
/*
Chernoff entropy and exponential tilting on finite pmfs.

  S(X, x) = sup_{lambda >= 0} { lambda*x - ln E[e^{lambda X}] }
gives the exponential-moment tail bound P(X >= x) <= exp(-S(X, x)). At the
optimizing lambda*, S(X, x) = KL(P_{lambda*} || P) where P_lambda is the
tilted pmf e^{lambda x_i} P(x_i) / Z(lambda).

check_partition_monotonicity exercises the data-processing facts used to push
a Chernoff bound through coarse binning: coarsening a pair of distributions
by a partition cannot increase their KL divergence, so the coarse-side
entropy KL(coarsen(P_{lambda(x)}) || coarsen(P)) is at most S(X, x). The
sup-form entropy of the coarse variable with conditional-mean values is also
reported; by Jensen it sits on the other side of S(X, x).
*/
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"

namespace missmass {

// Finite pmf on real support points, kept sorted strictly increasing.
struct FinitePMF {
  std::vector<double> values;
  std::vector<double> probs;

  FinitePMF(std::vector<double> v, std::vector<double> p)
      : values(std::move(v)), probs(std::move(p)) {
    if (values.empty() || values.size() != probs.size())
      fail(errc::bad_param, "pmf needs matching non-empty values/probs");
    long double sum = 0.0L;
    for (double q : probs) {
      if (!(q > 0.0)) fail(errc::non_positive_weight, "prob " + std::to_string(q));
      sum += q;
    }
    if (std::fabs(static_cast<double>(sum - 1.0L)) > 1e-12)
      fail(errc::sum_too_far_from_one, "probs sum to " + std::to_string((double)sum));
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1]))
        fail(errc::bad_param, "support values must be strictly increasing");
  }

  std::size_t size() const noexcept { return values.size(); }
  double mean() const {
    long double m = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i)
      m += static_cast<long double>(values[i]) * probs[i];
    return static_cast<double>(m);
  }
  double tail_at_least(double x) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] >= x) s += probs[i];
    return static_cast<double>(s);
  }
};

// ln E[e^{lambda X}], max-shifted for stability.
inline double log_mgf(const FinitePMF& pmf, double lambda) {
  double shift = -std::numeric_limits<double>::infinity();
  for (double v : pmf.values) shift = std::max(shift, lambda * v);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < pmf.size(); ++i)
    acc += pmf.probs[i] * std::exp(lambda * pmf.values[i] - shift);
  return shift + std::log(static_cast<double>(acc));
}

struct EntropyResult {
  double value = 0.0;   // S(X, x)
  double lambda = 0.0;  // optimizing lambda (infinite iff x >= max support)
};

namespace detail {

// Mean of the lambda-tilted pmf, max-shifted.
inline double tilted_mean(const FinitePMF& pmf, double lambda) {
  double shift = -std::numeric_limits<double>::infinity();
  for (double v : pmf.values) shift = std::max(shift, lambda * v);
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const long double e = pmf.probs[i] * std::exp(lambda * pmf.values[i] - shift);
    num += e * pmf.values[i];
    den += e;
  }
  return static_cast<double>(num / den);
}

}  // namespace detail

// Supremum of the concave objective lambda*x - log_mgf(lambda) over
// [0, 700/range]: a coarse ternary search brackets the optimum, then
// bisection on the derivative condition E_lambda[X] = x pins it down (the
// objective is too flat near its maximum for value comparisons alone).
// x at the top of the support returns -ln P(X = max); beyond it the
// supremum is infinite.
inline EntropyResult chernoff_entropy_detail(const FinitePMF& pmf, double x) {
  const double mean = pmf.mean();
  if (x <= mean) return {0.0, 0.0};
  const double vmax = pmf.values.back();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (x > vmax) return {inf, inf};
  if (x == vmax) return {-std::log(pmf.probs.back()), inf};

  const double range = vmax - pmf.values.front();
  double lo = 0.0, hi = 700.0 / range;
  auto h = [&](double lambda) { return lambda * x - log_mgf(pmf, lambda); };
  while (hi - lo > 1e-3 * std::max(1.0, hi)) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (h(m1) < h(m2))
      lo = m1;
    else
      hi = m2;
  }
  // widen so the sign change of E_lambda[X] - x stays inside the bracket
  lo = std::max(0.0, lo - (hi - lo));
  hi = std::min(700.0 / range, hi + (hi - lo));
  if (detail::tilted_mean(pmf, lo) > x) lo = 0.0;
  if (detail::tilted_mean(pmf, hi) < x) hi = 700.0 / range;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::tilted_mean(pmf, mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  return {std::max(0.0, h(lambda)), lambda};
}

inline double chernoff_entropy(const FinitePMF& pmf, double x) {
  return chernoff_entropy_detail(pmf, x).value;
}

// Exponential tilt P_lambda(x_i) = e^{lambda x_i} P(x_i) / Z(lambda).
inline FinitePMF tilt(const FinitePMF& pmf, double lambda) {
  if (lambda == 0.0) return pmf;
  const double lz = log_mgf(pmf, lambda);
  std::vector<double> probs(pmf.size());
  for (std::size_t i = 0; i < pmf.size(); ++i)
    probs[i] = std::max(std::exp(lambda * pmf.values[i] - lz + std::log(pmf.probs[i])),
                        std::numeric_limits<double>::denorm_min());
  long double sum = 0.0L;
  for (double p : probs) sum += p;
  for (double& p : probs) p = static_cast<double>(p / sum);
  return FinitePMF(pmf.values, std::move(probs));
}

// KL(p || q) over a shared support.
inline double kl(const FinitePMF& p, const FinitePMF& q) {
  if (p.size() != q.size() || p.values != q.values)
    fail(errc::support_mismatch, "kl requires identical supports");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    acc += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
  return std::max(0.0, static_cast<double>(acc));
}

namespace detail {

inline double kl_raw(const std::vector<double>& p, const std::vector<double>& q) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  return std::max(0.0, static_cast<double>(acc));
}

}  // namespace detail

struct PartitionCheckReport {
  double x = 0.0;
  double lambda = 0.0;
  double entropy_fine = 0.0;        // S(X, x)
  double entropy_coarse = 0.0;      // KL(coarsen(tilt) || coarsen(p)), the coarse-side exponent
  double entropy_coarse_sup = 0.0;  // sup-form entropy of the conditional-mean coarse pmf
  double kl_fine = 0.0;             // KL(tilt || p); equals entropy_fine at the optimum
  double df_fine = 0.0;             // KL(p || tilt)
  double df_coarse = 0.0;           // KL(coarsen(p) || coarsen(tilt))
  bool monotone_ok = false;         // entropy_fine >= entropy_coarse - 1e-9
  bool df_monotone_ok = false;      // df_coarse   <= df_fine + 1e-9
  bool chernoff_ok = false;         // exp(-entropy_fine) >= P(X >= x)
};

// Verifies the coarse-binning inequalities at deviation level x, for a
// partition whose groups are contiguous in value order. Group representative
// values are the conditional means under pmf.
inline PartitionCheckReport check_partition_monotonicity(const FinitePMF& pmf,
                                                         const PartitionSpec& spec,
                                                         double x) {
  spec.validate(pmf.size());
  for (const auto& g : spec.groups) {
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] != sorted[i - 1] + 1)
        fail(errc::bad_partition, "groups must be contiguous in value order");
  }
  if (x >= pmf.values.back() && x > pmf.mean())
    fail(errc::x_outside_support_hull,
         "monotonicity check needs x below the top of the support");

  PartitionCheckReport rep;
  rep.x = x;
  const EntropyResult fine = chernoff_entropy_detail(pmf, x);
  rep.lambda = fine.lambda;
  rep.entropy_fine = fine.value;
  const FinitePMF tilted = tilt(pmf, fine.lambda);
  rep.kl_fine = kl(tilted, pmf);
  rep.df_fine = kl(pmf, tilted);

  const std::size_t m = spec.groups.size();
  std::vector<double> coarse_p(m, 0.0), coarse_t(m, 0.0), coarse_v(m, 0.0);
  for (std::size_t gi = 0; gi < m; ++gi) {
    long double pm = 0.0L, tm = 0.0L, moment = 0.0L;
    for (std::size_t idx : spec.groups[gi]) {
      pm += pmf.probs[idx];
      tm += tilted.probs[idx];
      moment += static_cast<long double>(pmf.values[idx]) * pmf.probs[idx];
    }
    coarse_p[gi] = static_cast<double>(pm);
    coarse_t[gi] = static_cast<double>(tm);
    coarse_v[gi] = static_cast<double>(moment / pm);
  }

  rep.entropy_coarse = detail::kl_raw(coarse_t, coarse_p);
  rep.df_coarse = detail::kl_raw(coarse_p, coarse_t);
  rep.monotone_ok = rep.entropy_fine >= rep.entropy_coarse - 1e-9;
  rep.df_monotone_ok = rep.df_coarse <= rep.df_fine + 1e-9;
  rep.chernoff_ok = std::exp(-rep.entropy_fine) >= pmf.tail_at_least(x) - 1e-12;

  // Sup-form diagnostic on the conditional-mean coarse pmf (sorted by group
  // order, which contiguity makes increasing).
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return coarse_v[a] < coarse_v[b]; });
  std::vector<double> sv(m), sp(m);
  for (std::size_t i = 0; i < m; ++i) {
    sv[i] = coarse_v[order[i]];
    sp[i] = coarse_p[order[i]];
  }
  rep.entropy_coarse_sup = chernoff_entropy(FinitePMF(std::move(sv), std::move(sp)), x);
  return rep;
}

}  // namespace missmass
