#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "optbal/csv.hpp"
#include "optbal/errors.hpp"
#include "optbal/nudging.hpp"
#include "optbal/ramp.hpp"
#include "optbal/series.hpp"

namespace optbal {

/// Fitted convergence-rate model.  For the algebraic model, slope_or_rate is
/// the slope of log(residual) against log(eps) (the empirical order).  For
/// the exponential model it is the decay rate c in residual ~ exp(-c
/// (T/eps)^{1/3}), i.e. minus the slope against the cube-root abscissa.
struct RateFit {
  enum class Model { algebraic, exponential };
  Model model = Model::algebraic;
  double slope_or_rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Residuals at or below this value are treated as exact zeros and excluded
/// from fits (keeps log() away from -inf in exactly-linear cases).
inline constexpr double kResidualFloor = 1e-300;

namespace detail {

struct LineFit {
  double slope, intercept, r_squared;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("rate fit: degenerate abscissa (all points equal)");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = slope * x[i] + intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, intercept, r2};
}

/// Validates and canonicalizes the point order, so fits are invariant under
/// relabeling or reordering of the input.
inline std::vector<std::pair<double, double>> checked_fit_points(
    std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 3) throw Error("rate fit: need at least 3 points");
  for (const auto& [eps, r] : pts) {
    if (!(eps > 0.0)) throw Error("rate fit: eps must be positive");
    if (!(r > 0.0)) throw Error("rate fit: residuals must be positive");
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace detail

/// Least-squares line through (log eps, log residual); the slope is the
/// empirical algebraic order.
inline RateFit fit_algebraic_rate(const std::vector<std::pair<double, double>>& points) {
  const auto pts = detail::checked_fit_points(points);
  std::vector<double> x, y;
  for (const auto& [eps, r] : pts) {
    x.push_back(std::log(eps));
    y.push_back(std::log(std::max(r, kResidualFloor)));
  }
  const auto fit = detail::least_squares_line(x, y);
  return {RateFit::Model::algebraic, fit.slope, fit.intercept, fit.r_squared};
}

/// Least-squares line through ((T/eps)^{1/3}, log residual); the reported
/// rate is minus the slope and is positive for a conforming dataset.
inline RateFit fit_exponential_rate(const std::vector<std::pair<double, double>>& points,
                                    double ramp_time) {
  const auto pts = detail::checked_fit_points(points);
  if (!(ramp_time > 0.0)) throw Error("rate fit: T must be positive");
  std::vector<double> x, y;
  for (const auto& [eps, r] : pts) {
    x.push_back(std::cbrt(ramp_time / eps));
    y.push_back(std::log(std::max(r, kResidualFloor)));
  }
  const auto fit = detail::least_squares_line(x, y);
  return {RateFit::Model::exponential, -fit.slope, fit.intercept, fit.r_squared};
}

struct SweepCell {
  double epsilon = 0.0;
  double ramp_time = 0.0;
  std::string ramp;
  int order = 0;  // series order used for the balance residual
  double plateau_residual = 0.0;
  int plateau_index = 0;
  double balance_residual = 0.0;
  bool failed = false;
  std::string note;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  RateFit fit;
  bool fit_valid = false;
  std::string fit_note;
};

/// Truncation order matched to the exponential theorems' cube-root scaling,
/// clamped to the representable range.
inline int auto_series_order(double eps, double ramp_time, int cap = kSeriesOrderCap) {
  const int n = static_cast<int>(std::llround(std::cbrt(ramp_time / eps)));
  return std::clamp(n, 1, std::min(cap, kSeriesOrderMax));
}

/// Runs run_nudging over the eps grid for each ramp, recording the plateau
/// residual (running-minimum update norm at the plateau), the plateau index,
/// and the balance residual against G_n.  order < 0 selects the cube-root
/// rule per cell.  Cells run on a small worker pool (worker count capped by
/// hardware concurrency); results are reduced in cell order, so the output
/// is deterministic.  A diverging cell is recorded and excluded from the
/// fit; the sweep continues.
inline SweepResult sweep(const SystemSpec& sys, const NudgingConfig& base,
                         const std::vector<double>& eps_list, const std::vector<RampSpec>& ramps,
                         int order, int workers = 0, int kappa = 20) {
  if (eps_list.empty() || ramps.empty()) throw Error("sweep: empty grid");
  for (double eps : eps_list)
    if (eps > base.ramp_time) throw Error("sweep: every cell must satisfy eps <= T");
  const bool exponential_family = ramps.front().kind == RampKind::exponential;
  for (const auto& r : ramps)
    if ((r.kind == RampKind::exponential) != exponential_family)
      throw Error("sweep: all ramps in one sweep must share a family");

  struct CellSpec {
    RampSpec ramp;
    double eps;
  };
  std::vector<CellSpec> grid;
  for (const auto& r : ramps)
    for (double eps : eps_list) grid.push_back({r, eps});

  const auto run_cell = [&](const CellSpec& cs) {
    SweepCell cell;
    cell.epsilon = cs.eps;
    cell.ramp_time = base.ramp_time;
    cell.ramp = ramp_label(cs.ramp);
    cell.order = order >= 0 ? order : auto_series_order(cs.eps, base.ramp_time);
    try {
      NudgingConfig cfg = base;
      cfg.epsilon = cs.eps;
      cfg.ramp = cs.ramp;
      if (!(cfg.integration.step > 0.0)) cfg.integration.step = default_step(cs.eps, kappa);
      const NudgingResult res = run_nudging(sys, cfg);
      cell.plateau_index = res.plateau_index;
      cell.plateau_residual =
          *std::min_element(res.update_norms.begin(), res.update_norms.end());
      cell.balance_residual = balance_residual(sys, cfg, res, cell.order);
    } catch (const Error& e) {
      cell.failed = true;
      cell.note = e.what();
    }
    return cell;
  };

  int pool = workers > 0 ? workers : static_cast<int>(grid.size());
  pool = std::max(1, std::min<int>(pool, static_cast<int>(std::thread::hardware_concurrency())));

  SweepResult out;
  out.cells.resize(grid.size());
  for (std::size_t begin = 0; begin < grid.size(); begin += pool) {
    const std::size_t end = std::min(grid.size(), begin + pool);
    std::vector<std::future<SweepCell>> batch;
    for (std::size_t i = begin; i < end; ++i)
      batch.push_back(std::async(std::launch::async, run_cell, grid[i]));
    for (std::size_t i = begin; i < end; ++i) out.cells[i] = batch[i - begin].get();
  }

  std::vector<std::pair<double, double>> pts;
  bool zeros_excluded = false;
  for (const auto& c : out.cells) {
    if (c.failed) continue;
    if (c.balance_residual <= kResidualFloor) {
      zeros_excluded = true;
      continue;
    }
    pts.push_back({c.epsilon, c.balance_residual});
  }
  if (pts.size() < 3) {
    out.fit_valid = false;
    out.fit_note = zeros_excluded ? "fit skipped: residuals are exact zeros"
                                  : "fit skipped: fewer than 3 usable cells";
  } else {
    out.fit = exponential_family ? fit_exponential_rate(pts, base.ramp_time)
                                 : fit_algebraic_rate(pts);
    out.fit_valid = true;
    if (zeros_excluded) out.fit_note = "zero-residual cells excluded";
  }
  return out;
}

/// sweep.csv schema: eps,T,ramp,n,plateau_residual,plateau_index,balance_residual
inline CsvTable sweep_to_csv(const SweepResult& result) {
  CsvTable t;
  t.header = {"eps", "T", "ramp", "n", "plateau_residual", "plateau_index", "balance_residual"};
  for (const auto& c : result.cells) {
    if (c.failed) continue;
    t.rows.push_back({format_real(c.epsilon), format_real(c.ramp_time), c.ramp,
                      std::to_string(c.order), format_real(c.plateau_residual),
                      std::to_string(c.plateau_index), format_real(c.balance_residual)});
  }
  return t;
}

/// fit.csv schema: model,slope,intercept,r2.  A skipped fit writes a single
/// "skipped" row so downstream tooling sees the flag in-band.
inline CsvTable fit_to_csv(const SweepResult& result) {
  CsvTable t;
  t.header = {"model", "slope", "intercept", "r2"};
  if (!result.fit_valid) {
    t.rows.push_back({"skipped", "", "", ""});
    return t;
  }
  const char* model =
      result.fit.model == RateFit::Model::algebraic ? "algebraic" : "exponential";
  t.rows.push_back({model, format_real(result.fit.slope_or_rate),
                    format_real(result.fit.intercept), format_real(result.fit.r_squared)});
  return t;
}

}  // namespace optbal
