#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "optbal/errors.hpp"
#include "optbal/integrate.hpp"
#include "optbal/model.hpp"
#include "optbal/ramp.hpp"
#include "optbal/series.hpp"
#include "optbal/vec.hpp"

namespace optbal {

struct NudgingConfig {
  double epsilon = 0.1;
  double ramp_time = 1.0;  // T
  RampSpec ramp;
  Vector basepoint;   // q*
  Vector initial_p;   // p_0; empty means zero
  int max_iter = 30;
  double rtol = 1e-12;
  double damping = 1.0;  // alpha in (0, 1]
  IntegrationConfig integration;
};

struct NudgingResult {
  std::vector<Vector> iterates;  // p_0 .. p_M
  std::vector<double> update_norms;
  bool converged = false;
  int plateau_index = 0;
  Vector final;
};

/// Relative margin below which a smaller update norm does not count as an
/// improvement when locating the plateau; fluctuations at the quasi-limit
/// are of the same order as the residual itself.
inline constexpr double kPlateauImproveTol = 0.05;

/// Index of the last update that improved the running-minimum update norm
/// by more than kPlateauImproveTol relative.
inline int plateau_of(const std::vector<double>& update_norms) {
  int idx = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < update_norms.size(); ++m) {
    if (update_norms[m] < best * (1.0 - kPlateauImproveTol)) {
      best = update_norms[m];
      idx = static_cast<int>(m);
    }
  }
  return idx;
}

namespace detail {

inline void validate_nudging(const SystemSpec& sys, const NudgingConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw Error("nudging: eps must be positive");
  if (!(cfg.ramp_time > 0.0)) throw Error("nudging: ramp time must be positive");
  if (cfg.epsilon > cfg.ramp_time) throw Error("nudging: requires eps <= T");
  if (static_cast<int>(cfg.basepoint.size()) != sys.dim)
    throw Error("nudging: basepoint dimension mismatch");
  if (!cfg.initial_p.empty() && static_cast<int>(cfg.initial_p.size()) != sys.dim)
    throw Error("nudging: initial guess dimension mismatch");
  if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
    throw Error("nudging: damping must lie in (0, 1]");
  if (cfg.max_iter < 1) throw Error("nudging: max_iter must be >= 1");
  if (!(cfg.integration.step > 0.0)) throw Error("nudging: integration step must be positive");
}

}  // namespace detail

/// The paper's default initialization when the leading series term is
/// available: p_0 = G_0(q*) = -J grad V(q*).
inline Vector initial_guess_g0(const SystemSpec& sys, const Vector& basepoint) {
  return negated(apply_symplectic(grad_potential(sys.potential, basepoint)));
}

/// One backward-forward cycle.  Backward from (q*, p_m) at t = T down to
/// t = 0; only the turn-around position q(0) is kept, the fast variable is
/// reset to zero; forward back to t = T and return p(T).
inline Vector nudging_cycle(const SystemSpec& sys, const NudgingConfig& cfg, const Vector& p_m) {
  IntegrationConfig leg = cfg.integration;
  leg.store_trajectory = false;

  leg.direction = Direction::backward;
  PhaseState top{cfg.basepoint, p_m, cfg.ramp_time};
  const Trajectory back =
      integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, top, leg);

  leg.direction = Direction::forward;
  PhaseState bottom{back.back().q, Vector(sys.dim, 0.0), 0.0};
  const Trajectory fwd =
      integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, bottom, leg);
  return fwd.back().p;
}

/// Runs the nudging iteration p_{m+1} = p_m + alpha (cycle(p_m) - p_m) until
/// the update norm satisfies the relative tolerance or max_iter cycles have
/// run.  Non-convergence within max_iter is a reportable outcome, not an
/// error: the trace is returned either way.
inline NudgingResult run_nudging(const SystemSpec& sys, const NudgingConfig& cfg) {
  detail::validate_nudging(sys, cfg);
  NudgingResult res;
  Vector p = cfg.initial_p.empty() ? Vector(sys.dim, 0.0) : cfg.initial_p;
  res.iterates.push_back(p);
  for (int m = 0; m < cfg.max_iter; ++m) {
    Vector p_cycle;
    try {
      p_cycle = nudging_cycle(sys, cfg, p);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " (nudging cycle " + std::to_string(m) + ")",
                            e.step_index, m);
    }
    Vector p_next = cfg.damping == 1.0
                        ? std::move(p_cycle)
                        : vaxpy(p, cfg.damping, vsub(std::move(p_cycle), p));
    const double update = norm2(vsub(p_next, p));
    if (!std::isfinite(update) || !all_finite(p_next))
      throw DivergenceError("nudging iterate overflowed at cycle " + std::to_string(m), -1, m);
    res.update_norms.push_back(update);
    p = std::move(p_next);
    res.iterates.push_back(p);
    if (update <= cfg.rtol * std::max(1.0, norm2(p))) {
      res.converged = true;
      break;
    }
  }
  res.plateau_index = plateau_of(res.update_norms);
  res.final = res.iterates.back();
  return res;
}

/// || final - G_n(q*) ||, the quantity bounded by the quasi-convergence
/// theorems.
inline double balance_residual(const SystemSpec& sys, const NudgingConfig& cfg,
                               const NudgingResult& result, int order,
                               int order_cap = kSeriesOrderCap) {
  const Vector g =
      slow_manifold_point(sys, order, cfg.epsilon, cfg.basepoint, order_cap);
  return norm2(vsub(result.final, g));
}

/// Re-runs one backward-forward cycle from a converged iterate and returns
/// the stored forward trajectory (for remainder diagnostics and export).
inline Trajectory cycle_forward_trajectory(const SystemSpec& sys, const NudgingConfig& cfg,
                                           const Vector& p_m) {
  IntegrationConfig leg = cfg.integration;
  leg.store_trajectory = false;
  leg.direction = Direction::backward;
  PhaseState top{cfg.basepoint, p_m, cfg.ramp_time};
  const Trajectory back = integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, top, leg);

  leg.direction = Direction::forward;
  leg.store_trajectory = true;
  PhaseState bottom{back.back().q, Vector(sys.dim, 0.0), 0.0};
  return integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, bottom, leg);
}

/// Columns: m, update_norm[, balance_residual]; one row per iterate m >= 1.
inline void write_nudging_csv(const SystemSpec& sys, const NudgingConfig& cfg,
                              const NudgingResult& result, std::ostream& out,
                              int residual_order = -1) {
  out << "m,update_norm";
  if (residual_order >= 0) out << ",balance_residual";
  out << "\n";
  out.precision(17);
  Vector g;
  if (residual_order >= 0)
    g = slow_manifold_point(sys, residual_order, cfg.epsilon, cfg.basepoint);
  for (std::size_t m = 1; m < result.iterates.size(); ++m) {
    out << m << ',' << result.update_norms[m - 1];
    if (residual_order >= 0) out << ',' << norm2(vsub(result.iterates[m], g));
    out << "\n";
  }
}

}  // namespace optbal
