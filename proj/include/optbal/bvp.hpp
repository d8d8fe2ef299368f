#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "optbal/errors.hpp"
#include "optbal/integrate.hpp"
#include "optbal/model.hpp"
#include "optbal/ramp.hpp"
#include "optbal/vec.hpp"

namespace optbal {

/// Single-shooting reference solver for the optimal balance boundary value
/// problem p(0) = 0, q(T) = q*.  Valid at desk scale: T <= 1 and oscillatory
/// (not exponentially unstable) fast dynamics.
struct ShootingConfig {
  double epsilon = 0.1;
  double ramp_time = 1.0;
  RampSpec ramp;
  Vector basepoint;          // q*
  double newton_tol = 1e-10;
  int newton_max = 20;
  double jacobian_fd_step = 0.0;  // 0 -> 1e-6 * max(1, |q0|)
  IntegrationConfig integration;
};

struct ShootingSolution {
  Vector q0;          // root of the shooting map
  Vector balanced_p;  // p(T), the balanced state
  int iterations = 0;
  double residual_norm = 0.0;
};

/// q(T) - q* for the forward solution started at (q0, p = 0).
inline Vector shooting_residual(const SystemSpec& sys, const ShootingConfig& cfg,
                                const Vector& q0) {
  IntegrationConfig leg = cfg.integration;
  leg.direction = Direction::forward;
  leg.store_trajectory = false;
  PhaseState init{q0, Vector(sys.dim, 0.0), 0.0};
  const Trajectory t = integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, init, leg);
  return vsub(t.back().q, cfg.basepoint);
}

namespace detail {

struct ShootEval {
  Vector residual;
  Vector p_end;
};

inline ShootEval shoot(const SystemSpec& sys, const ShootingConfig& cfg, const Vector& q0) {
  IntegrationConfig leg = cfg.integration;
  leg.direction = Direction::forward;
  leg.store_trajectory = false;
  PhaseState init{q0, Vector(sys.dim, 0.0), 0.0};
  const Trajectory t = integrate_ramped(sys, cfg.ramp, cfg.epsilon, cfg.ramp_time, init, leg);
  return {vsub(t.back().q, cfg.basepoint), t.back().p};
}

}  // namespace detail

/// Damped Newton on the shooting residual with a forward-difference
/// Jacobian.  Initial guess q0 = q*.  Throws NoConvergenceError (carrying
/// the best residual norm) if newton_max iterations do not reach the
/// tolerance; the problem's well-posedness is only assumed up to a residual,
/// so that outcome is reportable rather than fatal.
inline ShootingSolution shooting_solve(const SystemSpec& sys, const ShootingConfig& cfg) {
  if (!(cfg.newton_tol > 0.0)) throw Error("shooting: newton_tol must be positive");
  if (cfg.epsilon > cfg.ramp_time) throw Error("shooting: requires eps <= T");

  Vector q0 = cfg.basepoint;
  detail::ShootEval cur = detail::shoot(sys, cfg, q0);
  double res_norm = norm2(cur.residual);
  int it = 0;
  while (res_norm > cfg.newton_tol) {
    if (it >= cfg.newton_max)
      throw NoConvergenceError("shooting: Newton did not converge in " +
                                   std::to_string(cfg.newton_max) +
                                   " iterations (best residual " + std::to_string(res_norm) + ")",
                               res_norm);
    const double h = cfg.jacobian_fd_step > 0.0
                         ? cfg.jacobian_fd_step
                         : 1e-6 * std::max(1.0, norm2(q0));
    Matrix jac(sys.dim, sys.dim);
    for (int c = 0; c < sys.dim; ++c) {
      Vector qp = q0;
      qp[c] += h;
      const Vector rp = detail::shoot(sys, cfg, qp).residual;
      for (int r = 0; r < sys.dim; ++r) jac(r, c) = (rp[r] - cur.residual[r]) / h;
    }
    const Vector step = solve_linear(jac, vscale(cur.residual, -1.0));

    // Halve the step until the residual norm decreases (at most 10 times).
    double lambda = 1.0;
    detail::ShootEval next = cur;
    Vector q_next = q0;
    for (int cut = 0; cut <= 10; ++cut) {
      q_next = vaxpy(q0, lambda, step);
      next = detail::shoot(sys, cfg, q_next);
      if (norm2(next.residual) < res_norm) break;
      lambda *= 0.5;
    }
    q0 = q_next;
    cur = next;
    res_norm = norm2(cur.residual);
    ++it;
  }
  return {q0, cur.p_end, it, res_norm};
}

}  // namespace optbal
