#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "optbal/errors.hpp"
#include "optbal/model.hpp"
#include "optbal/ramp.hpp"
#include "optbal/vec.hpp"

namespace optbal {

enum class Direction { forward, backward };

struct IntegrationConfig {
  double step = 0.0;  // dt > 0
  Direction direction = Direction::forward;
  bool store_trajectory = false;
};

struct Trajectory {
  std::vector<PhaseState> samples;
  double epsilon = 0.0;
  double ramp_time = 0.0;

  const PhaseState& back() const { return samples.back(); }
};

/// dt = eps / kappa.  kappa = 20 resolves the fast rotation comfortably for
/// a 4th-order one-step method.
inline double default_step(double eps, int kappa = 20) {
  if (!(eps > 0.0)) throw Error("default_step: eps must be positive");
  if (kappa < 1) throw Error("default_step: kappa must be >= 1");
  return eps / static_cast<double>(kappa);
}

namespace detail {

/// Classical 4-stage Runge-Kutta step; h may be negative.
template <class Field>
inline Vector rk4_step(Field&& field, double t, double h, const Vector& y) {
  const Vector k1 = field(t, y);
  const Vector k2 = field(t + 0.5 * h, vaxpy(y, 0.5 * h, k1));
  const Vector k3 = field(t + 0.5 * h, vaxpy(y, 0.5 * h, k2));
  const Vector k4 = field(t + h, vaxpy(y, h, k3));
  Vector out = y;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Fixed-step drive from t0 to t1 (either direction).  The step count is
/// ceil(|t1-t0|/dt); the final step is shrunk so the endpoint is exact.
/// on_step(step_index, t, y) is called after every accepted step.
template <class Field, class OnStep>
inline Vector rk4_drive(Field&& field, double t0, double t1, Vector y, double dt,
                        OnStep&& on_step) {
  if (!(dt > 0.0)) throw Error("integrate: step must be positive");
  const double span = std::abs(t1 - t0);
  const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-12)));
  const double sgn = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  for (long k = 0; k < nsteps; ++k) {
    const double t_next = (k == nsteps - 1) ? t1 : t0 + sgn * static_cast<double>(k + 1) * dt;
    y = rk4_step(field, t, t_next - t, y);
    t = t_next;
    for (double v : y) {
      if (!std::isfinite(v))
        throw DivergenceError("integration diverged (non-finite state) at step " +
                                  std::to_string(k) + ", t = " + std::to_string(t),
                              k);
    }
    on_step(k, t, y);
  }
  return y;
}

inline Vector pack_state(const PhaseState& s) {
  Vector y = s.q;
  y.insert(y.end(), s.p.begin(), s.p.end());
  return y;
}

inline PhaseState unpack_state(const Vector& y, int dim, double t) {
  PhaseState s;
  s.q.assign(y.begin(), y.begin() + dim);
  s.p.assign(y.begin() + dim, y.end());
  s.t = t;
  return s;
}

}  // namespace detail

/// Integrates the ramped system across [0, T] (forward) or [T, 0]
/// (backward) with the classical fixed-step RK4 scheme.  The backward pass
/// uses the same vector field with negated time increments, so backward and
/// forward grids mirror each other exactly.
inline Trajectory integrate_ramped(const SystemSpec& sys, const RampSpec& ramp, double eps,
                                   double ramp_time, const PhaseState& init,
                                   const IntegrationConfig& cfg) {
  if (!(eps > 0.0) || !(ramp_time > 0.0))
    throw Error("integrate_ramped: eps and ramp time must be positive");
  if (static_cast<int>(init.q.size()) != sys.dim || static_cast<int>(init.p.size()) != sys.dim)
    throw Error("integrate_ramped: state dimension mismatch");
  const bool forward = cfg.direction == Direction::forward;
  const double t_begin = forward ? 0.0 : ramp_time;
  const double t_end = forward ? ramp_time : 0.0;
  if (std::abs(init.t - t_begin) > 1e-12 * std::max(1.0, ramp_time))
    throw Error(forward ? "integrate_ramped: forward start requires t = 0"
                        : "integrate_ramped: backward start requires t = T");
  if (!all_finite(init.q) || !all_finite(init.p))
    throw Error("integrate_ramped: initial state must be finite");

  const auto field = [&](double t, const Vector& y) {
    const PhaseState s = detail::unpack_state(y, sys.dim, t);
    PhaseDeriv d = ramped_vector_field(sys, ramp, eps, ramp_time, s);
    Vector dy = std::move(d.dq);
    dy.insert(dy.end(), d.dp.begin(), d.dp.end());
    return dy;
  };

  Trajectory traj;
  traj.epsilon = eps;
  traj.ramp_time = ramp_time;
  PhaseState start = init;
  start.t = t_begin;
  traj.samples.push_back(start);

  const auto on_step = [&](long, double t, const Vector& y) {
    if (cfg.store_trajectory) traj.samples.push_back(detail::unpack_state(y, sys.dim, t));
  };
  const Vector y_end =
      detail::rk4_drive(field, t_begin, t_end, detail::pack_state(start), cfg.step, on_step);
  if (!cfg.store_trajectory) traj.samples.push_back(detail::unpack_state(y_end, sys.dim, t_end));
  return traj;
}

/// Columns: t, q_1..q_D, p_1..p_D.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int dim = traj.samples.empty() ? 0 : static_cast<int>(traj.samples.front().q.size());
  out << "t";
  for (int i = 1; i <= dim; ++i) out << ",q_" << i;
  for (int i = 1; i <= dim; ++i) out << ",p_" << i;
  out << "\n";
  out.precision(17);
  for (const auto& s : traj.samples) {
    out << s.t;
    for (double v : s.q) out << ',' << v;
    for (double v : s.p) out << ',' << v;
    out << "\n";
  }
}

}  // namespace optbal
