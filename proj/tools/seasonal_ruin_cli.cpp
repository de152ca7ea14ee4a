// Command-line front end: seasonal-ruin <subcommand> --model FILE [...]

#include "seasonal_ruin/genfun.hpp"
#include "seasonal_ruin/model_io.hpp"
#include "seasonal_ruin/montecarlo.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace seasonal_ruin;
using nlohmann::json;

namespace {

struct Formatter {
  int digits = 6;

  std::string operator()(double v) const {
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
  }
  std::string operator()(std::complex<double> z) const {
    return (*this)(z.real()) + "," + (*this)(z.imag());
  }
};

std::complex<double> parse_complex(const std::string& text) {
  auto comma = text.find(',');
  std::string re = text.substr(0, comma);
  std::string im = comma == std::string::npos ? "0" : text.substr(comma + 1);
  double a = 0.0;
  double b = 0.0;
  auto r1 = std::from_chars(re.data(), re.data() + re.size(), a);
  auto r2 = std::from_chars(im.data(), im.data() + im.size(), b);
  if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != re.data() + re.size() ||
      r2.ptr != im.data() + im.size()) {
    throw std::invalid_argument("--eval expects RE,IM");
  }
  return {a, b};
}

const char* status_name(MassStatus s) {
  switch (s) {
    case MassStatus::Solved:
      return "solved";
    case MassStatus::StructuralZero:
      return "zero";
    case MassStatus::Deferred:
      return "deferred";
  }
  return "?";
}

struct Common {
  std::string model_path;
  std::string format = "csv";
  int digits = 6;
  int working_digits = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  c.format = cmd->get_name() == "simulate" ? "json" : "csv";
  cmd->add_option("--model", c.model_path, "model file (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--precision", c.digits, "significant digits in numeric output")
      ->check(CLI::Range(1, 17));
  cmd->add_option("--working-digits", c.working_digits,
                  "decimal digits of the working precision (0 = automatic)")
      ->check(CLI::Range(0, 200));
  if (with_format) cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

int cmd_check(const Common& c) {
  auto model = load_model(c.model_path);
  Formatter f{c.digits};
  const auto regime = classify_regime(model);
  const double es = expected_cycle_claims(model);
  const double margin = net_profit_margin(model);
  if (c.format == "json") {
    json out{{"regime", to_string(regime)},
             {"expected_cycle_claims", es},
             {"cycle_premium", model.cycle_premium()},
             {"margin", margin}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << to_string(regime) << ", E S_N=" << f(es) << ", κN=" << model.cycle_premium()
              << ", margin=" << f(margin) << "\n";
  }
  return 0;
}

int cmd_roots(const Common& c) {
  auto model = load_model(c.model_path);
  auto roots = characteristic_roots<double>(model);
  Formatter f{c.digits};
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : roots.roots) {
      arr.push_back({{"re", r.value.real()},
                     {"im", r.value.imag()},
                     {"multiplicity", r.multiplicity},
                     {"residual", r.residual},
                     {"at_zero", r.at_zero},
                     {"in_band", r.in_band}});
    }
    std::cout << json{{"roots", arr}, {"total_with_multiplicity", roots.total_with_multiplicity},
                      {"method", roots.method}}
                     .dump(2)
              << "\n";
    return 0;
  }
  std::cout << "re,im,multiplicity,residual,flag\n";
  for (const auto& r : roots.roots) {
    std::string flag = r.at_zero ? "zero" : (r.in_band ? "band" : "");
    std::cout << f(r.value) << "," << r.multiplicity << "," << f(r.residual) << "," << flag << "\n";
  }
  return 0;
}

int cmd_boundary(const Common& c) {
  auto model = load_model(c.model_path);
  if (classify_regime(model) != Regime::NetProfit) {
    throw NetProfitViolated("the boundary system requires the net profit condition");
  }
  SurvivalOptions opt;
  int digits = c.working_digits > 0 ? c.working_digits : required_digits(model, model.cycle_premium(), opt);
  Formatter f{c.digits};
  return with_precision(digits, [&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto sol = solve_model<Real>(model, opt);
    auto sys = build_system<Real>(model, sol.roots);
    auto res = boundary_residuals<Real>(sys, sol.masses);
    double root_res = 0.0;
    double mean_res = 0.0;
    for (std::size_t r = 0; r < res.size(); ++r) {
      if (sys.row_tags[r].kind == RowTag::Kind::MeanEquation) {
        mean_res = res[r];
      } else {
        root_res = std::max(root_res, res[r]);
      }
    }
    if (c.format == "json") {
      json rows = json::array();
      for (long j = 1; j <= model.periods(); ++j) {
        for (long i = 0; i < model.kappa; ++i) {
          rows.push_back({{"j", j},
                          {"i", i},
                          {"m", to_double(sol.masses(j, i))},
                          {"status", status_name(sol.masses.status[j - 1][i])}});
        }
      }
      std::cout << json{{"masses", rows},
                        {"condition", sol.masses.condition},
                        {"log10_abs_det", sol.masses.log10_abs_det},
                        {"max_root_residual", root_res},
                        {"mean_residual", mean_res},
                        {"max_imaginary", sol.masses.max_imaginary}}
                       .dump(2)
                << "\n";
      return 0;
    }
    std::cout << "j,i,m,status\n";
    for (long j = 1; j <= model.periods(); ++j) {
      for (long i = 0; i < model.kappa; ++i) {
        std::cout << j << "," << i << "," << f(to_double(sol.masses(j, i))) << ","
                  << status_name(sol.masses.status[j - 1][i]) << "\n";
      }
    }
    std::cout << "# condition=" << f(sol.masses.condition) << " log10|det|=" << f(sol.masses.log10_abs_det)
              << " max_root_residual=" << f(root_res) << " mean_residual=" << f(mean_res)
              << " max_imaginary=" << f(sol.masses.max_imaginary) << "\n";
    return 0;
  });
}

int cmd_survive(const Common& c, long u_max, long horizon) {
  auto model = load_model(c.model_path);
  Formatter f{c.digits};
  SurvivalOptions opt;
  opt.precision = c.working_digits;
  if (horizon <= 0) {
    auto table = ultimate_survival(model, u_max, opt);
    if (c.format == "json") {
      std::cout << json{{"regime", to_string(table.regime)},
                        {"phi", table.phi},
                        {"working_digits", table.diagnostics.digits},
                        {"condition", table.diagnostics.condition}}
                       .dump(2)
                << "\n";
      return 0;
    }
    std::cout << "u,phi\n";
    for (long u = 0; u <= u_max; ++u) std::cout << u << "," << f(table.phi[static_cast<std::size_t>(u)]) << "\n";
    return 0;
  }
  auto fin = finite_survival(model, u_max, horizon);
  auto inf = ultimate_survival(model, u_max, opt).phi;
  if (c.format == "json") {
    std::cout << json{{"finite", fin.phi}, {"ultimate", inf}}.dump(2) << "\n";
    return 0;
  }
  std::cout << "T";
  for (long u = 0; u <= u_max; ++u) std::cout << ",u=" << u;
  std::cout << "\n";
  for (long t = 1; t <= horizon; ++t) {
    std::cout << t;
    for (long u = 0; u <= u_max; ++u) std::cout << "," << f(fin(u, t));
    std::cout << "\n";
  }
  std::cout << "inf";
  for (double v : inf) std::cout << "," << f(v);
  std::cout << "\n";
  return 0;
}

int cmd_genfun(const Common& c, const std::string& eval, long series) {
  auto model = load_model(c.model_path);
  Formatter f{c.digits};
  SurvivalOptions opt;
  opt.precision = c.working_digits;
  if (eval.empty() == (series <= 0)) throw std::invalid_argument("genfun needs exactly one of --eval or --series");
  if (!eval.empty()) {
    auto s = parse_complex(eval);
    auto v = generating_function(model, s, opt);
    if (c.format == "json") {
      std::cout << json{{"s", {s.real(), s.imag()}}, {"xi", {v.real(), v.imag()}}}.dump(2) << "\n";
    } else {
      std::cout << "re,im\n" << f(v) << "\n";
    }
    return 0;
  }
  auto coeffs = generating_series(model, series, opt);
  if (c.format == "json") {
    std::cout << json{{"coefficients", coeffs}}.dump(2) << "\n";
    return 0;
  }
  std::cout << "n,coefficient\n";
  for (std::size_t n = 0; n < coeffs.size(); ++n) std::cout << n << "," << f(coeffs[n]) << "\n";
  return 0;
}

int cmd_simulate(const Common& c, const SimConfig& cfg) {
  auto model = load_model(c.model_path);
  auto est = estimate_survival(model, cfg);
  const double lo = std::max(0.0, est.p_hat - est.half_width_95);
  const double hi = std::min(1.0, est.p_hat + est.half_width_95);
  json out{{"p_hat", est.p_hat},
           {"half_width_95", est.half_width_95},
           {"ci", {lo, hi}},
           {"paths", est.paths},
           {"u", cfg.u},
           {"horizon", cfg.horizon},
           {"seed", cfg.seed},
           {"rng", rng_id}};
  if (c.format == "csv") {
    Formatter f{c.digits};
    std::cout << "p_hat,half_width_95,ci_low,ci_high,paths,seed,rng\n"
              << f(est.p_hat) << "," << f(est.half_width_95) << "," << f(lo) << "," << f(hi) << "," << est.paths
              << "," << cfg.seed << "," << rng_id << "\n";
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_trajectory(const Common& c, long u, long steps, std::uint64_t seed) {
  auto model = load_model(c.model_path);
  auto path = trajectory(model, u, steps, seed);
  std::cout << "n,season,claim,surplus\n";
  for (const auto& p : path) std::cout << p.n << "," << p.season << "," << p.claim << "," << p.surplus << "\n";
  return 0;
}

int cmd_probe(long kappa_max, long n_max, long trials, std::uint64_t seed) {
  auto rep = probe_conjecture(kappa_max, n_max, trials, seed);
  json findings = json::array();
  for (const auto& fnd : rep.findings) {
    findings.push_back({{"kappa", fnd.kappa},
                        {"N", fnd.periods},
                        {"condition", fnd.condition},
                        {"log10_abs_det", fnd.log10_abs_det},
                        {"note", fnd.note}});
  }
  json out{{"trials", rep.trials},
           {"kappa_max", rep.kappa_max},
           {"n_max", rep.periods_max},
           {"seed", rep.seed},
           {"evaluated", rep.evaluated},
           {"min_log10_abs_det", rep.min_log10_abs_det},
           {"max_condition", rep.max_condition},
           {"singular_instances", rep.singular_instances},
           {"findings", findings}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival probabilities for the N-seasonal discrete-time risk model"};
  app.require_subcommand(1);

  Common c_check, c_roots, c_boundary, c_survive, c_genfun, c_simulate, c_traj;
  long u_max = 10;
  long horizon = 0;
  std::string eval;
  long series = 0;
  SimConfig sim;
  long steps = 20;
  long kappa_max = 3;
  long n_max = 3;
  long trials = 100;
  std::uint64_t seed = 42;

  auto* check = app.add_subcommand("check", "regime and net profit margin");
  add_common(check, c_check);
  auto* roots = app.add_subcommand("roots", "roots of s^(kappa N) = G_{S_N}(s) in the unit disk");
  add_common(roots, c_roots);
  auto* boundary = app.add_subcommand("boundary", "boundary masses m_i^(j)");
  add_common(boundary, c_boundary);
  auto* survive = app.add_subcommand("survive", "ultimate (and finite-time) survival probabilities");
  add_common(survive, c_survive);
  survive->add_option("--u-max", u_max, "largest initial surplus")->check(CLI::NonNegativeNumber);
  survive->add_option("--horizon", horizon, "finite horizon T (periods)")->check(CLI::PositiveNumber);
  auto* genfun = app.add_subcommand("genfun", "survival generating function");
  add_common(genfun, c_genfun);
  genfun->add_option("--eval", eval, "evaluate at s = RE,IM");
  genfun->add_option("--series", series, "number of series coefficients")->check(CLI::PositiveNumber);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo finite-time survival estimate");
  add_common(simulate, c_simulate);
  simulate->add_option("--u", sim.u, "initial surplus")->check(CLI::NonNegativeNumber);
  simulate->add_option("--horizon", sim.horizon, "horizon in periods")->check(CLI::PositiveNumber);
  simulate->add_option("--paths", sim.paths, "number of paths")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed");
  auto* traj = app.add_subcommand("trajectory", "one simulated surplus path as CSV");
  add_common(traj, c_traj, false);
  traj->add_option("--u", sim.u, "initial surplus")->check(CLI::NonNegativeNumber);
  traj->add_option("--n", steps, "number of periods")->check(CLI::NonNegativeNumber);
  traj->add_option("--seed", seed, "RNG seed");
  auto* probe = app.add_subcommand("probe-conjecture", "random search for singular boundary systems");
  probe->add_option("--kappa-max", kappa_max, "largest kappa")->check(CLI::PositiveNumber);
  probe->add_option("--n-max", n_max, "largest N")->check(CLI::PositiveNumber);
  probe->add_option("--trials", trials, "number of random models");
  probe->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  try {
    if (check->parsed()) return cmd_check(c_check);
    if (roots->parsed()) return cmd_roots(c_roots);
    if (boundary->parsed()) return cmd_boundary(c_boundary);
    if (survive->parsed()) return cmd_survive(c_survive, u_max, horizon);
    if (genfun->parsed()) return cmd_genfun(c_genfun, eval, series);
    if (simulate->parsed()) return cmd_simulate(c_simulate, sim);
    if (traj->parsed()) return cmd_trajectory(c_traj, sim.u, steps, seed);
    if (probe->parsed()) return cmd_probe(kappa_max, n_max, trials, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RuinError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
