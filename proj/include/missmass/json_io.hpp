#pragma once
// JSON (de)serialization for the library's value types, nlohmann-based.
// Distributions round-trip losslessly: weights are accepted either as doubles
// or as decimal strings, and are emitted as doubles (shortest representation
// that parses back to the same bits, i.e. up to 17 significant digits).
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "missmass/bounds.hpp"
#include "missmass/distribution.hpp"
#include "missmass/errors.hpp"
#include "missmass/missing_mass.hpp"
#include "missmass/na_checks.hpp"
#include "missmass/threshold.hpp"
#include "missmass/tilt_entropy.hpp"

namespace missmass {

using json = nlohmann::json;

namespace detail {

inline double number_from(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v.get<std::string>(), &pos);
      if (pos == v.get<std::string>().size()) return x;
    } catch (...) {
    }
  }
  fail(errc::bad_param, std::string(what) + " must be a number or decimal string");
}

inline std::vector<double> number_array(const json& arr, const char* what) {
  if (!arr.is_array()) fail(errc::bad_param, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(number_from(v, what));
  return out;
}

}  // namespace detail

inline json to_json(const DiscreteDistribution& d) {
  json j;
  j["weights"] = d.weights();
  if (!d.labels().empty()) j["labels"] = d.labels();
  if (d.is_subdistribution()) j["subdistribution"] = true;
  return j;
}

inline DiscreteDistribution distribution_from_json(const json& j) {
  if (!j.contains("weights")) fail(errc::bad_param, "distribution JSON needs \"weights\"");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  const bool sub = j.value("subdistribution", false);
  return DiscreteDistribution(detail::number_array(j["weights"], "weights"),
                              std::move(labels), sub);
}

inline json to_json(const FinitePMF& p) {
  return json{{"values", p.values}, {"probs", p.probs}};
}

inline FinitePMF pmf_from_json(const json& j) {
  if (!j.contains("values") || !j.contains("probs"))
    fail(errc::bad_param, "pmf JSON needs \"values\" and \"probs\"");
  return FinitePMF(detail::number_array(j["values"], "values"),
                   detail::number_array(j["probs"], "probs"));
}

inline json to_json(const PartitionSpec& s) { return json{{"groups", s.groups}}; }

inline PartitionSpec partition_from_json(const json& j) {
  if (!j.contains("groups")) fail(errc::bad_param, "partition JSON needs \"groups\"");
  PartitionSpec spec;
  spec.groups = j["groups"].get<std::vector<std::vector<std::size_t>>>();
  return spec;
}

inline json to_json(const MissingMassStats& s) {
  return json{{"n", s.n},
              {"mean", s.mean},
              {"variance_proxy", s.variance_proxy},
              {"weighted_variance", s.weighted_variance}};
}

inline json to_json(const DeviationEstimate& e) {
  return json{{"estimate", e.estimate},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"confidence", e.confidence},
              {"trials", e.trials},
              {"method", e.method == EstimateMethod::exact ? "exact" : "monte_carlo"},
              {"side", side_name(e.side)},
              {"epsilon", e.epsilon}};
}

inline json to_json(const BoundResult& r) {
  return json{{"epsilon", r.epsilon}, {"n", r.n},
              {"gamma", r.gamma},     {"c", r.c},
              {"exponent", r.exponent}, {"bound", r.bound},
              {"n_min", r.n_min},     {"domain_ok", r.domain_ok},
              {"side", bound_side_name(r.side)}};
}

inline json to_json(const ThresholdPartition& p) {
  return json{{"theta", p.theta},         {"n", p.n},     {"tau", p.tau},
              {"tau_prime", p.tau_prime}, {"below", p.below}, {"mid", p.mid},
              {"above", p.above}};
}

inline json to_json(const NAReport& r) {
  json j{{"set_a", r.set_a},
         {"set_b", r.set_b},
         {"f", monotone_fn_name(r.f.kind)},
         {"g", monotone_fn_name(r.g.kind)},
         {"empirical_cov", r.empirical_cov},
         {"ci_low", r.ci_low},
         {"ci_high", r.ci_high},
         {"trials", r.trials},
         {"verdict", r.verdict == Verdict::consistent ? "consistent" : "violation"}};
  if (r.f.kind == MonotoneFnKind::indicator_above) j["f_threshold"] = r.f.threshold;
  if (r.g.kind == MonotoneFnKind::indicator_above) j["g_threshold"] = r.g.threshold;
  if (r.pair) j["pair"] = {r.pair->first, r.pair->second};
  if (r.exact_cov) j["exact_cov"] = *r.exact_cov;
  return j;
}

inline json to_json(const PartitionCheckReport& r) {
  json j{{"x", r.x},
         {"lambda", r.lambda},
         {"entropy_fine", r.entropy_fine},
         {"entropy_coarse", r.entropy_coarse},
         {"kl_fine", r.kl_fine},
         {"df_fine", r.df_fine},
         {"df_coarse", r.df_coarse},
         {"monotone_ok", r.monotone_ok},
         {"df_monotone_ok", r.df_monotone_ok},
         {"chernoff_ok", r.chernoff_ok}};
  if (std::isfinite(r.entropy_coarse_sup))
    j["entropy_coarse_sup"] = r.entropy_coarse_sup;
  else
    j["entropy_coarse_sup"] = nullptr;
  return j;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_param, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::bad_param, "invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace missmass
