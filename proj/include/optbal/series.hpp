#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "optbal/dual.hpp"
#include "optbal/errors.hpp"
#include "optbal/model.hpp"
#include "optbal/ramp.hpp"
#include "optbal/vec.hpp"

namespace optbal {

/// Default rejection threshold for the series order.  Past this order the
/// truncation error grows at every parameter range this library targets, so
/// higher orders are opt-in (callers may pass a larger cap, up to the
/// compile-time nesting ceiling below).
inline constexpr int kSeriesOrderCap = 8;

/// Absolute ceiling: the dual-number nesting is instantiated to this depth
/// plus one (the remainder differentiates f_n once more).
inline constexpr int kSeriesOrderMax = 10;

namespace detail {

inline constexpr int kSeriesNestLimit = kSeriesOrderMax + 2;

/// Coefficient fields of the autonomous slow-manifold series,
///   g_0 = -J grad V,   g_k = -J sum_{i+j=k-1} Dg_i g_j.
/// Each Dg_i g_j is a directional derivative obtained by re-running the
/// recursion on values seeded with a first-order perturbation, so the dual
/// nesting depth grows with k.  Never materializes a Jacobian.
template <class S>
VecT<S> g_coeff_rec(const PotentialSpec& pot, int k, const VecT<S>& q) {
  if (k == 0) return negated(apply_symplectic(grad_potential_t(pot, q)));
  if constexpr (dual_depth_v<S> + 1 >= kSeriesNestLimit) {
    // Unreachable below the order caps enforced by the public entry points.
    throw Error("slow-manifold series: dual nesting limit exceeded");
  } else {
    VecT<S> acc = zeros_like<S>(q.size());
    for (int i = 0; i < k; ++i) {
      const VecT<S> direction = g_coeff_rec(pot, k - 1 - i, q);
      const VecT<Dual<S>> probe = g_coeff_rec(pot, i, seed_direction(q, direction));
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] = acc[m] + probe[m].der;
    }
    return negated(apply_symplectic(acc));
  }
}

/// Coefficient fields of the ramped, time-dependent series,
///   f_0 = -rho(t/T) J grad V,
///   f_k = -J dt f_{k-1} - J sum_{i+j=k-1} Df_i f_j,
/// where Df is the q-Jacobian and dt the time partial; both come from the
/// same dual-seeding mechanism (t seeded for the time derivative).
template <class S>
VecT<S> f_coeff_rec(const PotentialSpec& pot, const RampSpec& ramp, double ramp_time, int k,
                    const VecT<S>& q, const S& t) {
  if (k == 0) {
    const S rho = eval_ramp_t(ramp, t / ramp_time);
    VecT<S> out = apply_symplectic(grad_potential_t(pot, q));
    for (auto& x : out) x = -(rho * x);
    return out;
  }
  if constexpr (dual_depth_v<S> + 1 >= kSeriesNestLimit) {
    throw Error("slow-manifold series: dual nesting limit exceeded");
  } else {
    const Dual<S> t_seeded{t, scalar_const<S>(1.0)};
    const VecT<Dual<S>> f_prev =
        f_coeff_rec(pot, ramp, ramp_time, k - 1, seed_constant(q), t_seeded);
    VecT<S> acc = derivative_parts(f_prev);  // dt f_{k-1}
    const Dual<S> t_const{t, scalar_const<S>(0.0)};
    for (int i = 0; i < k; ++i) {
      const VecT<S> direction = f_coeff_rec(pot, ramp, ramp_time, k - 1 - i, q, t);
      const VecT<Dual<S>> probe =
          f_coeff_rec(pot, ramp, ramp_time, i, seed_direction(q, direction), t_const);
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] = acc[m] + probe[m].der;
    }
    return negated(apply_symplectic(acc));
  }
}

inline void check_order(int n, int cap, const char* who) {
  if (n < 0) throw Error(std::string(who) + ": order must be nonnegative");
  if (cap > kSeriesOrderMax) cap = kSeriesOrderMax;
  if (n > cap)
    throw Error(std::string(who) + ": order " + std::to_string(n) + " exceeds cap " +
                std::to_string(cap));
}

}  // namespace detail

/// Coefficients [g_0(q) ... g_n(q)] of the slow-manifold series G_n.
inline std::vector<Vector> g_coefficients(const SystemSpec& sys, int n, const Vector& q,
                                          int order_cap = kSeriesOrderCap) {
  detail::check_order(n, order_cap, "g_coefficients");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out.push_back(detail::g_coeff_rec<double>(sys.potential, k, q));
  return out;
}

/// G_n(q) = sum_i g_i(q) eps^i, the order-n slow-manifold point over q.
inline Vector slow_manifold_point(const SystemSpec& sys, int n, double eps, const Vector& q,
                                  int order_cap = kSeriesOrderCap) {
  const auto coeffs = g_coefficients(sys, n, q, order_cap);
  Vector out(q.size(), 0.0);
  double w = 1.0;
  for (const auto& c : coeffs) {
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += w * c[m];
    w *= eps;
  }
  return out;
}

/// Coefficients [f_0(q,t) ... f_n(q,t)] of the ramped series F_n.
inline std::vector<Vector> f_coefficients(const SystemSpec& sys, const RampSpec& ramp,
                                          double ramp_time, int n, const Vector& q, double t,
                                          int order_cap = kSeriesOrderCap) {
  detail::check_order(n, order_cap, "f_coefficients");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    out.push_back(detail::f_coeff_rec<double>(sys.potential, ramp, ramp_time, k, q, t));
  return out;
}

/// F_n(q,t) = sum_i f_i(q,t) eps^i.
inline Vector ramped_manifold_point(const SystemSpec& sys, const RampSpec& ramp, double ramp_time,
                                    int n, double eps, const Vector& q, double t,
                                    int order_cap = kSeriesOrderCap) {
  const auto coeffs = f_coefficients(sys, ramp, ramp_time, n, q, t, order_cap);
  Vector out(q.size(), 0.0);
  double w = 1.0;
  for (const auto& c : coeffs) {
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += w * c[m];
    w *= eps;
  }
  return out;
}

/// Series remainder
///   R_n = -eps^n dt f_n - sum_{s=n}^{2n} eps^s sum_{i+j=s, i,j<=n} Df_i f_j,
/// the forcing left over after truncating the ramped expansion at order n.
inline Vector remainder(const SystemSpec& sys, const RampSpec& ramp, double ramp_time, int n,
                        double eps, const Vector& q, double t,
                        int order_cap = kSeriesOrderCap) {
  detail::check_order(n, order_cap, "remainder");
  using D1 = Dual<double>;
  const PotentialSpec& pot = sys.potential;

  const D1 t_seeded{t, 1.0};
  const VecT<D1> f_top =
      detail::f_coeff_rec<D1>(pot, ramp, ramp_time, n, seed_constant<double>(q), t_seeded);
  Vector out(q.size(), 0.0);
  const double eps_n = std::pow(eps, n);
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = -eps_n * f_top[m].der;

  const D1 t_const{t, 0.0};
  for (int s = n; s <= 2 * n; ++s) {
    const double w = std::pow(eps, s);
    for (int i = std::max(0, s - n); i <= std::min(n, s); ++i) {
      const int j = s - i;
      const Vector direction = detail::f_coeff_rec<double>(pot, ramp, ramp_time, j, q, t);
      const VecT<D1> probe =
          detail::f_coeff_rec<D1>(pot, ramp, ramp_time, i, seed_direction(q, direction), t_const);
      for (std::size_t m = 0; m < out.size(); ++m) out[m] -= w * probe[m].der;
    }
  }
  return out;
}

/// Fast residual w = p - F_n(q, t); a diagnostic of the deviation from the
/// time-dependent series manifold, never consumed by the nudging iteration.
inline Vector fast_residual(const SystemSpec& sys, const RampSpec& ramp, double ramp_time, int n,
                            double eps, const PhaseState& state,
                            int order_cap = kSeriesOrderCap) {
  const Vector f = ramped_manifold_point(sys, ramp, ramp_time, n, eps, state.q, state.t, order_cap);
  return vsub(state.p, f);
}

/// Evaluated series bundle: per-order coefficients, the eps-weighted value,
/// and (for the ramped variant) the remainder norm.
struct SeriesEval {
  int order = 0;
  std::vector<Vector> coefficients;
  Vector value;
  std::optional<double> remainder_norm;
};

inline SeriesEval evaluate_slow_series(const SystemSpec& sys, int n, double eps, const Vector& q,
                                       int order_cap = kSeriesOrderCap) {
  SeriesEval ev;
  ev.order = n;
  ev.coefficients = g_coefficients(sys, n, q, order_cap);
  ev.value.assign(q.size(), 0.0);
  double w = 1.0;
  for (const auto& c : ev.coefficients) {
    for (std::size_t m = 0; m < ev.value.size(); ++m) ev.value[m] += w * c[m];
    w *= eps;
  }
  return ev;
}

inline SeriesEval evaluate_ramped_series(const SystemSpec& sys, const RampSpec& ramp,
                                         double ramp_time, int n, double eps, const Vector& q,
                                         double t, int order_cap = kSeriesOrderCap) {
  SeriesEval ev;
  ev.order = n;
  ev.coefficients = f_coefficients(sys, ramp, ramp_time, n, q, t, order_cap);
  ev.value.assign(q.size(), 0.0);
  double w = 1.0;
  for (const auto& c : ev.coefficients) {
    for (std::size_t m = 0; m < ev.value.size(); ++m) ev.value[m] += w * c[m];
    w *= eps;
  }
  ev.remainder_norm = norm2(remainder(sys, ramp, ramp_time, n, eps, q, t, order_cap));
  return ev;
}

}  // namespace optbal
