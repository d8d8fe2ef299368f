#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "optbal/errors.hpp"
#include "optbal/integrate.hpp"
#include "optbal/model.hpp"
#include "optbal/ramp.hpp"

namespace optbal {

/// Exact slow manifold of the action-angle oscillator,
///   G(theta) = sum_k f_k / (i (k eps - 1)) e^{i k theta},
/// from the mode-by-mode ansatz p = G(theta) in eps p' = i p + f(theta).
inline std::complex<double> oscillator_exact_slow(const OscillatorSpec& osc, double eps,
                                                  double theta) {
  check_resonance(osc, eps);
  std::complex<double> g = 0.0;
  const std::complex<double> i_unit(0.0, 1.0);
  for (const auto& m : osc.modes) {
    g += m.amplitude / (i_unit * (m.wavenumber * eps - 1.0)) *
         std::exp(i_unit * static_cast<double>(m.wavenumber) * theta);
  }
  return g;
}

namespace detail {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.96028985649753618, -0.79666647741362673, -0.52553240991632899, -0.18343464249564978,
    0.18343464249564978,  0.52553240991632899,  0.79666647741362673,  0.96028985649753618};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.10122853629037669, 0.22238103445337434, 0.31370664587788705, 0.36268378337836177,
    0.36268378337836177, 0.31370664587788705, 0.22238103445337434, 0.10122853629037669};

inline int oscillatory_panel_count(double eps, double ramp_time, int panels_per_period) {
  const double periods = ramp_time / (2.0 * std::numbers::pi * eps);
  return std::max(4, static_cast<int>(std::ceil(panels_per_period * periods)));
}

}  // namespace detail

/// Exact solution of the ramped oscillator BVP (p(0) = 0) by
/// variation of constants,
///   p(T) = (1/eps) int_0^T e^{i (T-t)/eps} rho(t/T) f(theta* + (t-T)) dt,
/// evaluated by composite Gauss-Legendre with at least panels_per_period
/// panels per fast period 2 pi eps.
inline std::complex<double> oscillator_balanced_pT(const OscillatorSpec& osc,
                                                   const RampSpec& ramp, double eps,
                                                   double ramp_time, double theta_star,
                                                   int panels_per_period = 40) {
  check_resonance(osc, eps);
  const int panels = detail::oscillatory_panel_count(eps, ramp_time, panels_per_period);
  const std::complex<double> i_unit(0.0, 1.0);
  std::complex<double> total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = ramp_time * static_cast<double>(k) / panels;
    const double b = ramp_time * static_cast<double>(k + 1) / panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int g = 0; g < 8; ++g) {
      const double t = mid + half * detail::kGaussNodes[g];
      const std::complex<double> phase = std::exp(i_unit * ((ramp_time - t) / eps));
      const std::complex<double> f = oscillator_coupling(osc, theta_star + (t - ramp_time));
      total += detail::kGaussWeights[g] * half * phase * eval_ramp(ramp, t / ramp_time) * f;
    }
  }
  return total / eps;
}

struct OscillatorNudgeResult {
  std::vector<std::complex<double>> iterates;
  std::vector<double> update_norms;
  bool converged = false;
  int plateau_index = 0;
  std::complex<double> final;
};

/// Backward-forward nudging applied to the oscillator, with theta in the
/// role of the basepoint coordinate.  Theta stays continuous across the
/// t = 0 turn-around; only p is reset.  Since theta' = 1 exactly, the
/// forward leg always starts from theta* - T, so the scheme converges in a
/// single cycle.
inline OscillatorNudgeResult oscillator_nudge(const OscillatorSpec& osc, const RampSpec& ramp,
                                              double eps, double ramp_time, double theta_star,
                                              std::complex<double> p0, int max_iter = 30,
                                              double rtol = 1e-12, int kappa = 20) {
  check_resonance(osc, eps);
  if (!(ramp_time > 0.0) || eps > ramp_time) throw Error("oscillator_nudge: requires 0 < eps <= T");
  const double dt = default_step(eps, kappa);
  const auto field = [&](double t, const Vector& y) {
    const OscState s{y[0], {y[1], y[2]}, t};
    const OscDeriv d = oscillator_vector_field(osc, ramp, eps, ramp_time, s);
    return Vector{d.dtheta, d.dp.real(), d.dp.imag()};
  };
  const auto no_op = [](long, double, const Vector&) {};

  OscillatorNudgeResult res;
  std::complex<double> p = p0;
  res.iterates.push_back(p);
  for (int m = 0; m < max_iter; ++m) {
    const Vector back = detail::rk4_drive(field, ramp_time, 0.0,
                                          Vector{theta_star, p.real(), p.imag()}, dt, no_op);
    const Vector fwd =
        detail::rk4_drive(field, 0.0, ramp_time, Vector{back[0], 0.0, 0.0}, dt, no_op);
    const std::complex<double> p_next(fwd[1], fwd[2]);
    res.update_norms.push_back(std::abs(p_next - p));
    p = p_next;
    res.iterates.push_back(p);
    if (res.update_norms.back() <= rtol * std::max(1.0, std::abs(p))) {
      res.converged = true;
      break;
    }
  }
  int idx = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < res.update_norms.size(); ++m) {
    if (res.update_norms[m] < best * 0.95) {
      best = res.update_norms[m];
      idx = static_cast<int>(m);
    }
  }
  res.plateau_index = idx;
  res.final = res.iterates.back();
  return res;
}

}  // namespace optbal
