// Command-line front end: run single nudging experiments, parameter sweeps,
// oscillator oracle checks, and nudging-vs-shooting comparisons from flat
// key = value config files.  Outputs are CSV tables plus a static SVG plot
// for sweeps.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "optbal/optbal.hpp"

namespace fs = std::filesystem;
using namespace optbal;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir_override;
};

fs::path resolve_out_dir(const Config& cfg, const CommonOptions& opt) {
  const std::string dir =
      !opt.out_dir_override.empty() ? opt.out_dir_override : cfg.get_string("out_dir", ".");
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

SystemSpec load_toy_system(const Config& cfg) {
  const std::string system = cfg.get_string("system", "toy");
  if (system != "toy")
    throw ConfigError("this subcommand drives the toy model; got system = \"" + system + "\"");
  const int dim = static_cast<int>(cfg.get_int("dim", 2));
  return make_system(dim, parse_potential(cfg.get_string("potential")));
}

Vector load_basepoint(const Config& cfg, int dim) {
  if (cfg.has("qstar")) {
    Vector q = cfg.get_real_list("qstar");
    if (static_cast<int>(q.size()) != dim)
      throw ConfigError("qstar has " + std::to_string(q.size()) + " entries, expected " +
                        std::to_string(dim));
    return q;
  }
  Vector q(dim, 0.0);
  q[0] = 1.0;
  return q;
}

NudgingConfig load_nudging(const Config& cfg, const SystemSpec& sys, double eps) {
  NudgingConfig n;
  n.epsilon = eps;
  n.ramp_time = cfg.get_real("T");
  n.ramp = parse_ramp(cfg.get_string("ramp"));
  n.basepoint = load_basepoint(cfg, sys.dim);
  n.max_iter = static_cast<int>(cfg.get_int("max_iter", 30));
  n.rtol = cfg.get_real("rtol", 1e-12);
  n.damping = cfg.get_real("alpha", 1.0);
  n.integration.step = default_step(eps, static_cast<int>(cfg.get_int("kappa", 20)));
  const std::string p0 = cfg.get_string("p0", "zero");
  if (p0 == "g0")
    n.initial_p = initial_guess_g0(sys, n.basepoint);
  else if (p0 != "zero")
    throw ConfigError("p0 must be \"zero\" or \"g0\", got \"" + p0 + "\"");
  return n;
}

/// Series order for residual reporting: explicit integer, or "auto" for the
/// cube-root rule; defaults to the ramp's own order (auto for exp ramps).
int resolve_order(const Config& cfg, const RampSpec& ramp, double eps, double ramp_time) {
  const std::string raw = cfg.get_string("order_n", "");
  if (raw.empty())
    return ramp.kind == RampKind::exponential ? auto_series_order(eps, ramp_time) : ramp.order;
  if (raw == "auto") return auto_series_order(eps, ramp_time);
  try {
    std::size_t pos = 0;
    const int n = std::stoi(raw, &pos);
    if (pos != raw.size() || n < 0) throw std::invalid_argument(raw);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("order_n must be a nonnegative integer or \"auto\", got \"" + raw + "\"");
  }
}

std::vector<double> load_eps_list(const Config& cfg) {
  if (cfg.has("epsilon_list")) return cfg.get_real_list("epsilon_list");
  return {cfg.get_real("epsilon")};
}

OscillatorSpec load_oscillator(const Config& cfg) {
  const std::string raw = cfg.get_string("modes");
  OscillatorSpec osc;
  std::stringstream ss(raw);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::vector<std::string> fields;
    std::stringstream fs_(tok);
    std::string f;
    while (std::getline(fs_, f, ':')) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 3)
      throw ConfigError("mode \"" + tok + "\" must be k:re or k:re:im");
    try {
      std::size_t pos = 0;
      const int k = std::stoi(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument(fields[0]);
      const double re = std::stod(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument(fields[1]);
      double im = 0.0;
      if (fields.size() == 3) {
        im = std::stod(fields[2], &pos);
        if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
      }
      osc.modes.push_back({k, {re, im}});
    } catch (const std::exception&) {
      throw ConfigError("malformed mode \"" + tok + "\" in modes list");
    }
  }
  if (osc.modes.empty()) throw ConfigError("modes list is empty");
  return osc;
}

int cmd_run(const CommonOptions& opt) {
  const Config cfg = Config::parse_file(opt.config_path);
  const fs::path out_dir = resolve_out_dir(cfg, opt);
  const SystemSpec sys = load_toy_system(cfg);
  const double eps = cfg.get_real("epsilon");
  const NudgingConfig ncfg = load_nudging(cfg, sys, eps);
  const int order = resolve_order(cfg, ncfg.ramp, eps, ncfg.ramp_time);

  const NudgingResult res = run_nudging(sys, ncfg);

  std::ofstream trace(out_dir / "trace.csv", std::ios::binary);
  if (!trace) throw Error("cannot write " + (out_dir / "trace.csv").string());
  write_nudging_csv(sys, ncfg, res, trace, order);

  if (cfg.has("trajectory_csv")) {
    const Trajectory traj = cycle_forward_trajectory(sys, ncfg, res.final);
    std::ofstream tf(out_dir / cfg.get_string("trajectory_csv"), std::ios::binary);
    if (!tf) throw Error("cannot write trajectory csv");
    write_trajectory_csv(traj, tf);
  }

  const double final_residual = balance_residual(sys, ncfg, res, order);
  std::cout << "final_residual=" << format_real(final_residual)
            << " plateau_index=" << res.plateau_index << " converged="
            << (res.converged ? "true" : "false") << " iterations=" << res.update_norms.size()
            << "\n";
  return 0;
}

int cmd_sweep(const CommonOptions& opt) {
  const Config cfg = Config::parse_file(opt.config_path);
  const fs::path out_dir = resolve_out_dir(cfg, opt);
  const SystemSpec sys = load_toy_system(cfg);
  const std::vector<double> eps_list = load_eps_list(cfg);

  std::vector<RampSpec> ramps;
  {
    std::stringstream ss(cfg.get_string("ramp"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t");
      const auto e = tok.find_last_not_of(" \t");
      ramps.push_back(parse_ramp(tok.substr(b, e - b + 1)));
    }
  }

  NudgingConfig base = load_nudging(cfg, sys, eps_list.front());
  base.integration.step = 0.0;  // filled per cell from kappa
  const int kappa = static_cast<int>(cfg.get_int("kappa", 20));

  int order = -1;
  const std::string raw_order = cfg.get_string("order_n", "auto");
  if (raw_order != "auto") {
    try {
      std::size_t pos = 0;
      order = std::stoi(raw_order, &pos);
      if (pos != raw_order.size() || order < 0) throw std::invalid_argument(raw_order);
    } catch (const std::exception&) {
      throw ConfigError("order_n must be a nonnegative integer or \"auto\"");
    }
  } else if (ramps.front().kind == RampKind::polynomial) {
    order = ramps.front().order;
  }

  const int workers = static_cast<int>(cfg.get_int("workers", 0));
  const SweepResult res = sweep(sys, base, eps_list, ramps, order, workers, kappa);

  int ok_cells = 0;
  for (const auto& c : res.cells) {
    if (c.failed)
      std::cerr << "warning: cell eps=" << c.epsilon << " ramp=" << c.ramp
                << " failed: " << c.note << "\n";
    else
      ++ok_cells;
  }

  write_csv_file(sweep_to_csv(res), (out_dir / "sweep.csv").string());
  write_csv_file(fit_to_csv(res), (out_dir / "fit.csv").string());

  // residual-vs-eps plot in the coordinates of the fitted model
  SvgPlot plot;
  const bool exponential = ramps.front().kind == RampKind::exponential;
  plot.title = exponential ? "balance residual vs (T/eps)^(1/3)" : "balance residual vs eps";
  plot.x_label = exponential ? "(T/eps)^(1/3)" : "log10 eps";
  plot.y_label = "log10 residual";
  for (const auto& c : res.cells) {
    if (c.failed || c.balance_residual <= kResidualFloor) continue;
    const double x = exponential ? std::cbrt(base.ramp_time / c.epsilon) : std::log10(c.epsilon);
    plot.points.push_back({x, std::log10(c.balance_residual)});
  }
  std::sort(plot.points.begin(), plot.points.end());
  if (res.fit_valid) {
    plot.has_line = true;
    const double ln10 = std::log(10.0);
    if (exponential) {
      plot.line_slope = -res.fit.slope_or_rate / ln10;
      plot.line_intercept = res.fit.intercept / ln10;
    } else {
      plot.line_slope = res.fit.slope_or_rate;
      plot.line_intercept = res.fit.intercept / ln10;
    }
  }
  if (!plot.points.empty()) write_svg_file(plot, (out_dir / "sweep.svg").string());

  if (res.fit_valid) {
    std::cout << "fit: model=" << (exponential ? "exponential" : "algebraic")
              << " slope=" << format_real(res.fit.slope_or_rate)
              << " r2=" << format_real(res.fit.r_squared) << "\n";
  } else {
    std::cout << "fit: " << res.fit_note << "\n";
  }
  return ok_cells > 0 ? 0 : 1;
}

int cmd_oracle_check(const CommonOptions& opt) {
  const Config cfg = Config::parse_file(opt.config_path);
  const fs::path out_dir = resolve_out_dir(cfg, opt);
  const std::string system = cfg.get_string("system", "oscillator");
  if (system != "oscillator")
    throw ConfigError("oracle-check drives the oscillator; got system = \"" + system + "\"");
  const OscillatorSpec osc = load_oscillator(cfg);
  const RampSpec ramp = parse_ramp(cfg.get_string("ramp"));
  const double T = cfg.get_real("T");
  const double theta_star = cfg.get_real("theta_star", 0.0);
  const int panels = static_cast<int>(cfg.get_int("panels_per_period", 40));

  CsvTable table;
  table.header = {"eps", "ramp", "err", "predicted_order"};
  for (double eps : load_eps_list(cfg)) {
    const std::complex<double> pT = oscillator_balanced_pT(osc, ramp, eps, T, theta_star, panels);
    const std::complex<double> g = oscillator_exact_slow(osc, eps, theta_star);
    const std::string predicted =
        ramp.kind == RampKind::polynomial ? std::to_string(ramp.order + 1) : "";
    table.rows.push_back(
        {format_real(eps), ramp_label(ramp), format_real(std::abs(pT - g)), predicted});
  }
  write_csv_file(table, (out_dir / "oracle_check.csv").string());
  std::cout << "wrote " << (out_dir / "oracle_check.csv").string() << " (" << table.rows.size()
            << " rows)\n";
  return 0;
}

int cmd_bvp_compare(const CommonOptions& opt) {
  const Config cfg = Config::parse_file(opt.config_path);
  const fs::path out_dir = resolve_out_dir(cfg, opt);
  const SystemSpec sys = load_toy_system(cfg);

  CsvTable table;
  table.header = {"eps", "T", "ramp", "shoot_vs_nudge", "plateau_norm"};
  int ok = 0;
  for (double eps : load_eps_list(cfg)) {
    const NudgingConfig ncfg = load_nudging(cfg, sys, eps);
    ShootingConfig scfg;
    scfg.epsilon = eps;
    scfg.ramp_time = ncfg.ramp_time;
    scfg.ramp = ncfg.ramp;
    scfg.basepoint = ncfg.basepoint;
    scfg.newton_tol = cfg.get_real("newton_tol", 1e-10);
    scfg.newton_max = static_cast<int>(cfg.get_int("newton_max", 20));
    scfg.integration = ncfg.integration;
    try {
      const NudgingResult nres = run_nudging(sys, ncfg);
      const ShootingSolution sol = shooting_solve(sys, scfg);
      const double plateau =
          *std::min_element(nres.update_norms.begin(), nres.update_norms.end());
      table.rows.push_back({format_real(eps), format_real(ncfg.ramp_time),
                            ramp_label(ncfg.ramp),
                            format_real(norm2(vsub(sol.balanced_p, nres.final))),
                            format_real(plateau)});
      ++ok;
    } catch (const Error& e) {
      std::cerr << "warning: eps=" << eps << " failed: " << e.what() << "\n";
      table.rows.push_back(
          {format_real(eps), format_real(ncfg.ramp_time), ramp_label(ncfg.ramp), "nan", "nan"});
    }
  }
  write_csv_file(table, (out_dir / "bvp_compare.csv").string());
  std::cout << "wrote " << (out_dir / "bvp_compare.csv").string() << " (" << ok << "/"
            << table.rows.size() << " cells)\n";
  return ok > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal balance via backward-forward nudging"};
  app.require_subcommand(1);

  CommonOptions run_opt, sweep_opt, oracle_opt, bvp_opt;
  const auto add_common = [](CLI::App* sub, CommonOptions& opt) {
    sub->add_option("config", opt.config_path, "path to a key = value config file")
        ->required();
    sub->add_option("--out-dir", opt.out_dir_override, "override the config's out_dir");
  };
  add_common(app.add_subcommand("run", "one nudging experiment, iterate trace to CSV"), run_opt);
  add_common(app.add_subcommand("sweep", "eps sweep with rate fit, CSV + SVG"), sweep_opt);
  add_common(app.add_subcommand("oracle-check", "oscillator quadrature vs exact manifold"),
             oracle_opt);
  add_common(app.add_subcommand("bvp-compare", "shooting solution vs nudging quasi-limit"),
             bvp_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(run_opt);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_opt);
    if (app.got_subcommand("oracle-check")) return cmd_oracle_check(oracle_opt);
    if (app.got_subcommand("bvp-compare")) return cmd_bvp_compare(bvp_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
