#pragma once
#include <stdexcept>
#include <string>

namespace missmass {

// Every throwing operation in the library reports one of these conditions.
// The name string is stable and machine-readable (the CLI emits it verbatim).
enum class errc {
  non_positive_weight,
  sum_too_far_from_one,
  bad_param,
  theta_out_of_range,
  not_split,
  no_mid_bin,
  bad_partition,
  support_too_large,
  epsilon_out_of_range,
  gamma_out_of_domain,
  negative_variance,
  no_crossover,
  domain_error,
  support_mismatch,
  x_outside_support_hull,
  index_out_of_range,
  requires_distinct,
  overlapping_sets,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_weight: return "NonPositiveWeight";
    case errc::sum_too_far_from_one: return "SumTooFarFromOne";
    case errc::bad_param: return "BadParam";
    case errc::theta_out_of_range: return "ThetaOutOfRange";
    case errc::not_split: return "NotSplit";
    case errc::no_mid_bin: return "NoMidBin";
    case errc::bad_partition: return "BadPartition";
    case errc::support_too_large: return "SupportTooLarge";
    case errc::epsilon_out_of_range: return "EpsilonOutOfRange";
    case errc::gamma_out_of_domain: return "GammaOutOfDomain";
    case errc::negative_variance: return "NegativeVariance";
    case errc::no_crossover: return "NoCrossover";
    case errc::domain_error: return "DomainError";
    case errc::support_mismatch: return "SupportMismatch";
    case errc::x_outside_support_hull: return "XOutsideSupportHull";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::requires_distinct: return "RequiresDistinct";
    case errc::overlapping_sets: return "OverlappingSets";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, std::string(errc_name(code)) + ": " + msg);
}

}  // namespace missmass
