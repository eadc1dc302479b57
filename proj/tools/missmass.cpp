// missmass: bound queries, simulations and verification sweeps for the
// missing mass of a finite discrete distribution.
//
// Output goes to stdout (or --output FILE) as json, csv or an aligned table.
// Errors print machine-readable JSON to stderr; exit code 2 flags usage
// errors, 1 domain errors.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "missmass/missmass.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 123456789;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MISSMASS_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      missmass::fail(missmass::errc::bad_param, "MISSMASS_SEED is not an integer");
    }
  }
  return kDefaultSeed;
}

std::string format_cell(const ordered_json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void render(const std::vector<ordered_json>& rows, bool single, const std::string& format,
            std::ostream& os) {
  if (format == "json") {
    if (single && rows.size() == 1)
      os << rows[0].dump(2) << "\n";
    else {
      ordered_json arr = ordered_json::array();
      for (const auto& r : rows) arr.push_back(r);
      os << arr.dump(2) << "\n";
    }
    return;
  }
  if (rows.empty()) return;
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (auto it = r.begin(); it != r.end(); ++it)
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end())
        cols.push_back(it.key());

  if (format == "csv") {
    for (std::size_t c = 0; c < cols.size(); ++c)
      os << (c ? "," : "") << csv_escape(cols[c]);
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < cols.size(); ++c)
        os << (c ? "," : "")
           << csv_escape(r.contains(cols[c]) ? format_cell(r.at(cols[c])) : "");
      os << "\n";
    }
    return;
  }
  // table
  std::vector<std::size_t> width(cols.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();
  for (const auto& r : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::string cell = r.contains(cols[c]) ? format_cell(r.at(cols[c])) : "";
      if (cell.size() > 22 && r.at(cols[c]).is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", r.at(cols[c]).get<double>());
        cell = buf;
      }
      width[c] = std::max(width[c], cell.size());
      line.push_back(std::move(cell));
    }
    cells.push_back(std::move(line));
  }
  for (std::size_t c = 0; c < cols.size(); ++c)
    os << (c ? "  " : "") << cols[c] << std::string(width[c] - cols[c].size(), ' ');
  os << "\n";
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      os << (c ? "  " : "") << line[c] << std::string(width[c] - line[c].size(), ' ');
    os << "\n";
  }
}

missmass::Side parse_side(const std::string& s) {
  if (s == "upper") return missmass::Side::upper;
  if (s == "lower") return missmass::Side::lower;
  missmass::fail(missmass::errc::bad_param, "side must be upper or lower");
}

missmass::BoundSide parse_bound_side(const std::string& s) {
  if (s == "upper") return missmass::BoundSide::upper;
  if (s == "lower") return missmass::BoundSide::lower;
  if (s == "two" || s == "two_sided") return missmass::BoundSide::two_sided;
  missmass::fail(missmass::errc::bad_param, "side must be upper, lower or two");
}

missmass::SamplingModel parse_model(const std::string& s) {
  if (s == "multinomial") return missmass::SamplingModel::multinomial;
  if (s == "independent") return missmass::SamplingModel::independent;
  missmass::fail(missmass::errc::bad_param, "model must be multinomial or independent");
}

ordered_json bound_row(const missmass::BoundResult& r) {
  return ordered_json{{"epsilon", r.epsilon}, {"n", r.n},
                      {"gamma", r.gamma},     {"c", r.c},
                      {"exponent", r.exponent}, {"bound", r.bound},
                      {"n_min", r.n_min},     {"side", missmass::bound_side_name(r.side)},
                      {"domain_ok", r.domain_ok}};
}

ordered_json estimate_row(const missmass::DeviationEstimate& e) {
  return ordered_json{
      {"epsilon", e.epsilon},
      {"side", missmass::side_name(e.side)},
      {"estimate", e.estimate},
      {"ci_low", e.ci_low},
      {"ci_high", e.ci_high},
      {"confidence", e.confidence},
      {"trials", e.trials},
      {"method", e.method == missmass::EstimateMethod::exact ? "exact" : "monte_carlo"}};
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) missmass::fail(missmass::errc::bad_param, "empty grid entry");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      missmass::fail(missmass::errc::bad_param, "bad grid entry \"" + tok + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) missmass::fail(missmass::errc::bad_param, "empty grid");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"missing-mass concentration bounds, simulations and checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  std::string output_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--format", format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--output", output_path, "write output to a file instead of stdout");
  app.add_option("--seed", seed, "master seed (default: MISSMASS_SEED or 123456789)")
      ->each([&](const std::string&) { seed_set = true; });

  // bound
  auto* cmd_bound = app.add_subcommand("bound", "evaluate the deviation bound");
  cmd_bound->fallthrough();
  double b_eps = 0.0;
  std::uint64_t b_n = 0;
  std::string b_side = "upper";
  cmd_bound->add_option("--epsilon", b_eps)->required();
  cmd_bound->add_option("--n", b_n)->required();
  cmd_bound->add_option("--side", b_side)->check(CLI::IsMember({"upper", "lower", "two"}));

  // gamma
  auto* cmd_gamma = app.add_subcommand("gamma", "gamma_eps, c(eps), n_min, gap bound");
  cmd_gamma->fallthrough();
  double g_eps = 0.0;
  cmd_gamma->add_option("--epsilon", g_eps)->required();

  // crossover
  auto* cmd_cross = app.add_subcommand("crossover", "where the bound beats e^{-a n eps^2}");
  cmd_cross->fallthrough();
  double x_coeff = 1.0;
  std::string x_side = "upper";
  cmd_cross->add_option("--coefficient", x_coeff)->required();
  cmd_cross->add_option("--side", x_side)->check(CLI::IsMember({"upper", "lower"}));

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "exact missing-mass moments");
  cmd_stats->fallthrough();
  std::string s_dist;
  std::uint64_t s_n = 0;
  cmd_stats->add_option("--dist", s_dist)->required();
  cmd_stats->add_option("--n", s_n)->required();

  // exact
  auto* cmd_exact = app.add_subcommand("exact", "exact deviation probability (N <= 20)");
  cmd_exact->fallthrough();
  std::string e_dist, e_side = "upper", e_model = "multinomial";
  std::uint64_t e_n = 0;
  double e_eps = 0.0;
  cmd_exact->add_option("--dist", e_dist)->required();
  cmd_exact->add_option("--n", e_n)->required();
  cmd_exact->add_option("--epsilon", e_eps)->required();
  cmd_exact->add_option("--side", e_side)->check(CLI::IsMember({"upper", "lower"}));
  cmd_exact->add_option("--model", e_model)
      ->check(CLI::IsMember({"multinomial", "independent"}));

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo deviation probability");
  cmd_sim->fallthrough();
  std::string m_dist, m_side = "upper", m_model = "multinomial";
  std::uint64_t m_n = 0, m_trials = 100000;
  double m_eps = 0.0;
  cmd_sim->add_option("--dist", m_dist)->required();
  cmd_sim->add_option("--n", m_n)->required();
  cmd_sim->add_option("--epsilon", m_eps)->required();
  cmd_sim->add_option("--side", m_side)->check(CLI::IsMember({"upper", "lower"}));
  cmd_sim->add_option("--trials", m_trials);
  cmd_sim->add_option("--model", m_model)
      ->check(CLI::IsMember({"multinomial", "independent"}));

  // verify
  auto* cmd_verify = app.add_subcommand("verify", "bound-vs-simulation sweep");
  cmd_verify->fallthrough();
  std::string v_dist, v_eps_grid, v_n_grid;
  std::uint64_t v_trials = 100000;
  cmd_verify->add_option("--dist", v_dist)->required();
  cmd_verify->add_option("--epsilon-grid", v_eps_grid, "comma separated")->required();
  cmd_verify->add_option("--n-grid", v_n_grid, "comma separated")->required();
  cmd_verify->add_option("--trials", v_trials);

  // transform
  auto* cmd_tr = app.add_subcommand("transform", "split/absorb a distribution");
  cmd_tr->fallthrough();
  std::string t_dist, t_op = "both";
  double t_theta = 0.0;
  std::uint64_t t_n = 0;
  cmd_tr->add_option("--dist", t_dist)->required();
  cmd_tr->add_option("--theta", t_theta)->required();
  cmd_tr->add_option("--n", t_n)->required();
  cmd_tr->add_option("--op", t_op)->check(CLI::IsMember({"split", "absorb", "both"}));

  // entropy-check
  auto* cmd_ent = app.add_subcommand("entropy-check", "coarse-binning monotonicity report");
  cmd_ent->fallthrough();
  std::string p_pmf, p_partition;
  double p_x = 0.0;
  cmd_ent->add_option("--pmf", p_pmf, "JSON file with values/probs")->required();
  cmd_ent->add_option("--partition", p_partition, "JSON file with groups")->required();
  cmd_ent->add_option("--x", p_x)->required();

  // na-check
  auto* cmd_na = app.add_subcommand("na-check", "negative-association test battery");
  cmd_na->fallthrough();
  std::string n_dist;
  std::uint64_t n_n = 0, n_trials = 100000;
  cmd_na->add_option("--dist", n_dist)->required();
  cmd_na->add_option("--n", n_n)->required();
  cmd_na->add_option("--trials", n_trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream msg;
    msg << e.what();
    nlohmann::json err{{"error", {{"type", "Usage"}, {"message", msg.str()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    if (!seed_set) seed = default_seed();
    std::vector<ordered_json> rows;
    bool single = true;

    if (*cmd_bound) {
      rows.push_back(bound_row(missmass::missing_mass_bound(b_eps, b_n,
                                                            parse_bound_side(b_side))));
    } else if (*cmd_gamma) {
      const double g = missmass::gamma_eps(g_eps);
      rows.push_back(ordered_json{{"epsilon", g_eps},
                                  {"gamma", g},
                                  {"c", missmass::c_eps(g_eps)},
                                  {"n_min", missmass::min_sample_size(g_eps)},
                                  {"gap_bound", missmass::compensation_gap_bound(g_eps)}});
    } else if (*cmd_cross) {
      const double star = missmass::crossover(
          {x_coeff, parse_bound_side(x_side), "e^{-a n eps^2} comparator"});
      rows.push_back(ordered_json{
          {"coefficient", x_coeff}, {"side", x_side}, {"epsilon_star", star}});
    } else if (*cmd_stats) {
      const auto dist = missmass::parse_dist_spec(s_dist);
      const auto st = missmass::missing_mass_stats(dist, s_n);
      rows.push_back(ordered_json{{"dist", s_dist},
                                  {"n", st.n},
                                  {"mean", st.mean},
                                  {"variance_proxy", st.variance_proxy},
                                  {"weighted_variance", st.weighted_variance}});
    } else if (*cmd_exact) {
      const auto dist = missmass::parse_dist_spec(e_dist);
      auto row = estimate_row(missmass::exact_deviation_prob(
          dist, e_n, e_eps, parse_side(e_side), parse_model(e_model)));
      row["dist"] = e_dist;
      row["n"] = e_n;
      rows.push_back(std::move(row));
    } else if (*cmd_sim) {
      const auto dist = missmass::parse_dist_spec(m_dist);
      auto row = estimate_row(missmass::mc_deviation_prob(dist, m_n, m_eps,
                                                          parse_side(m_side), m_trials,
                                                          seed, parse_model(m_model)));
      row["dist"] = m_dist;
      row["n"] = m_n;
      row["seed"] = seed;
      rows.push_back(std::move(row));
    } else if (*cmd_verify) {
      single = false;
      const auto dist = missmass::parse_dist_spec(v_dist);
      auto eps_grid = parse_grid(v_eps_grid);
      auto n_grid = parse_grid(v_n_grid);
      std::sort(eps_grid.begin(), eps_grid.end());
      std::sort(n_grid.begin(), n_grid.end());
      std::uint64_t run = 0;
      for (double eps : eps_grid)
        for (double n_raw : n_grid) {
          const auto n = static_cast<std::uint64_t>(n_raw);
          const std::uint64_t n_min = missmass::min_sample_size(eps);
          for (missmass::Side side : {missmass::Side::upper, missmass::Side::lower}) {
            ordered_json row{{"epsilon", eps},
                             {"n", n},
                             {"side", missmass::side_name(side)},
                             {"n_min", n_min}};
            if (n < n_min) {
              row["status"] = "skipped";
              row["estimate"] = nullptr;
              row["ci_low"] = nullptr;
              row["ci_high"] = nullptr;
              row["bound"] = nullptr;
              row["holds"] = nullptr;
            } else {
              const auto mc = missmass::mc_deviation_prob(dist, n, eps, side, v_trials,
                                                          seed + run);
              const auto bound = missmass::missing_mass_bound(
                  eps, n,
                  side == missmass::Side::upper ? missmass::BoundSide::upper
                                                : missmass::BoundSide::lower);
              row["status"] = "ok";
              row["estimate"] = mc.estimate;
              row["ci_low"] = mc.ci_low;
              row["ci_high"] = mc.ci_high;
              row["bound"] = bound.bound;
              row["holds"] = mc.estimate <= bound.bound;
            }
            rows.push_back(std::move(row));
            ++run;
          }
        }
    } else if (*cmd_tr) {
      const auto dist = missmass::parse_dist_spec(t_dist);
      const double tau = t_theta / static_cast<double>(t_n);
      const double before = missmass::expected_missing_mass(dist, t_n);
      missmass::DiscreteDistribution out = dist;
      ordered_json row{{"dist", t_dist},       {"op", t_op},
                       {"theta", t_theta},     {"n", t_n},
                       {"tau", tau},           {"tau_prime", 2.0 * tau},
                       {"bins_before", dist.size()}, {"mean_before", before}};
      if (t_op == "split" || t_op == "both") {
        out = missmass::split(out, t_theta, t_n);
        const double mean_split = missmass::expected_missing_mass(out, t_n);
        // bias of the split step; bounded by e^{-theta}
        row["mean_split"] = mean_split;
        row["split_gap"] = mean_split - before;
        row["split_gap_bound"] = std::exp(-t_theta);
      }
      if (t_op == "absorb" || t_op == "both") out = missmass::absorb(out, t_theta, t_n);
      const double after = missmass::expected_missing_mass(out, t_n);
      double wmin = 1.0, wmax = 0.0;
      for (double w : out.weights()) {
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
      }
      row["bins_after"] = out.size();
      row["mean_after"] = after;
      row["min_weight"] = wmin;
      row["max_weight"] = wmax;
      row["total_mass"] = out.total_mass();
      row["weights"] = out.weights();
      rows.push_back(std::move(row));
    } else if (*cmd_ent) {
      const auto pmf = missmass::pmf_from_json(missmass::load_json_file(p_pmf));
      const auto spec =
          missmass::partition_from_json(missmass::load_json_file(p_partition));
      const auto rep = missmass::check_partition_monotonicity(pmf, spec, p_x);
      rows.push_back(ordered_json::parse(missmass::to_json(rep).dump()));
    } else if (*cmd_na) {
      single = false;
      const auto dist = missmass::parse_dist_spec(n_dist);
      const std::size_t N = dist.size();
      if (N < 2) missmass::fail(missmass::errc::bad_param, "na-check needs N >= 2");
      std::vector<std::size_t> first_half, second_half, evens, odds;
      for (std::size_t i = 0; i < N; ++i) {
        (i < N / 2 ? first_half : second_half).push_back(i);
        (i % 2 == 0 ? evens : odds).push_back(i);
      }
      double wa = 0.0;
      for (std::size_t i : first_half) wa += dist.weights()[i];

      struct Cfg {
        std::vector<std::size_t> a, b;
        missmass::MonotoneFn f, g;
      };
      std::vector<Cfg> cfgs = {
          {{0}, {1}, {missmass::MonotoneFnKind::sum}, {missmass::MonotoneFnKind::sum}},
          {first_half, second_half, {missmass::MonotoneFnKind::sum},
           {missmass::MonotoneFnKind::sum}},
          {first_half, second_half,
           {missmass::MonotoneFnKind::indicator_above, static_cast<double>(n_n) * wa},
           {missmass::MonotoneFnKind::indicator_above,
            static_cast<double>(n_n) * (1.0 - wa)}},
          {evens, odds, {missmass::MonotoneFnKind::max}, {missmass::MonotoneFnKind::max}}};
      std::uint64_t k = 0;
      for (const auto& cfg : cfgs) {
        const auto rep = missmass::na_monotone_test(dist, n_n, cfg.a, cfg.b, cfg.f,
                                                    cfg.g, n_trials, seed + k++);
        rows.push_back(ordered_json::parse(missmass::to_json(rep).dump()));
      }
    }

    std::ofstream file;
    if (!output_path.empty()) {
      file.open(output_path);
      if (!file)
        missmass::fail(missmass::errc::bad_param, "cannot open " + output_path);
    }
    render(rows, single, format, output_path.empty() ? std::cout : file);
    return 0;
  } catch (const missmass::Error& e) {
    nlohmann::json err{{"error", {{"type", e.code_name()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return e.code() == missmass::errc::bad_param ? 2 : 1;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"type", "Internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
