#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "optbal/dual.hpp"
#include "optbal/errors.hpp"

namespace optbal {

enum class RampKind { polynomial, exponential };

/// A ramp function rho: [0,1] -> [0,1] with rho(0)=0, rho(1)=1 and endpoint
/// derivatives vanishing up to the declared order (polynomial kind) or to
/// all orders (exponential kind).
struct RampSpec {
  RampKind kind = RampKind::polynomial;
  int order = 0;                     // endpoint order; polynomial kind only
  std::vector<double> coefficients;  // monomial basis c[0] + c[1]*x + ...
};

namespace detail {

inline unsigned long long binomial_ull(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
  }
  return r;
}

}  // namespace detail

/// Normalized incomplete-Beta ramp of endpoint order n:
///   rho_n(x) = int_0^x t^n (1-t)^n dt / int_0^1 t^n (1-t)^n dt,
/// a degree-(2n+1) polynomial with integer coefficients, so the order
/// condition holds exactly in double arithmetic.
inline RampSpec make_poly_ramp(int n) {
  if (n < 0) throw Error("make_poly_ramp: order must be nonnegative");
  RampSpec r;
  r.kind = RampKind::polynomial;
  r.order = n;
  r.coefficients.assign(static_cast<std::size_t>(2 * n + 2), 0.0);
  // 1/B = (2n+1) * C(2n, n)
  const unsigned long long inv_b =
      static_cast<unsigned long long>(2 * n + 1) * detail::binomial_ull(2 * n, n);
  for (int j = 0; j <= n; ++j) {
    const unsigned long long num = detail::binomial_ull(n, j) * inv_b;
    // (n+j+1) always divides C(n,j)/B; keep the division in integers
    const unsigned long long den = static_cast<unsigned long long>(n + j + 1);
    const double mag = (num % den == 0) ? static_cast<double>(num / den)
                                        : static_cast<double>(num) / static_cast<double>(den);
    r.coefficients[static_cast<std::size_t>(n + j + 1)] = (j % 2 == 0) ? mag : -mag;
  }
  return r;
}

/// Gevrey-2 ramp e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}), evaluated in the
/// overflow-safe logistic form 1 / (1 + e^{1/x - 1/(1-x)}).
inline RampSpec make_exp_ramp() {
  RampSpec r;
  r.kind = RampKind::exponential;
  r.order = 0;  // satisfies every order; field unused for this kind
  return r;
}

/// Ramp evaluation for plain or dual scalars.  Arguments outside [0,1]
/// clamp to the endpoint values; for the exponential kind the endpoints
/// themselves are flat, so the clamped constant carries the correct
/// (all-zero) derivative jet.
template <class S>
inline S eval_ramp_t(const RampSpec& ramp, const S& theta) {
  const double t = real_part(theta);
  if (ramp.kind == RampKind::polynomial) {
    if (t < 0.0) return scalar_const<S>(0.0);
    if (t > 1.0) return scalar_const<S>(1.0);
    S acc = scalar_const<S>(0.0);
    for (std::size_t j = ramp.coefficients.size(); j-- > 0;) {
      acc = acc * theta + ramp.coefficients[j];
    }
    return acc;
  }
  if (t <= 0.0) return scalar_const<S>(0.0);
  if (t >= 1.0) return scalar_const<S>(1.0);
  const S x = 1.0 / theta - 1.0 / (1.0 - theta);
  if (real_part(x) > 700.0) return scalar_const<S>(0.0);
  if (real_part(x) < -700.0) return scalar_const<S>(1.0);
  return 1.0 / (1.0 + exp(x));
}

inline double eval_ramp(const RampSpec& ramp, double theta) {
  return eval_ramp_t<double>(ramp, theta);
}

namespace detail {

/// i-th iterated central difference, O(h^2).
inline double central_difference(const RampSpec& ramp, double theta, int i, double h) {
  double s = 0.0;
  double sign = 1.0;
  for (int j = 0; j <= i; ++j) {
    s += sign * static_cast<double>(binomial_ull(i, j)) *
         eval_ramp(ramp, theta + (0.5 * i - j) * h);
    sign = -sign;
  }
  return s / std::pow(h, i);
}

}  // namespace detail

/// i-th derivative of the ramp.  Polynomial kind differentiates the
/// coefficients exactly.  Exponential kind uses central differences with one
/// Richardson level; this is accurate to ~1e-12 at the flat endpoints (the
/// only place the order-condition tests evaluate it) and degrades in the
/// interior as i grows, since the Gevrey-2 derivative magnitudes reach ~1e3
/// by i=4.  Orders above 6 are refused for the exponential kind.
inline double eval_ramp_derivative(const RampSpec& ramp, double theta, int i) {
  if (i < 1) throw Error("eval_ramp_derivative: order must be positive");
  if (ramp.kind == RampKind::polynomial) {
    std::vector<double> c = ramp.coefficients;
    for (int d = 0; d < i; ++d) {
      if (c.size() <= 1) return 0.0;
      for (std::size_t j = 1; j < c.size(); ++j) c[j - 1] = static_cast<double>(j) * c[j];
      c.pop_back();
    }
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * theta + c[j];
    return acc;
  }
  if (i > 6)
    throw Error("eval_ramp_derivative: exponential kind supports derivative orders <= 6");
  const double h = (i <= 4) ? 5e-3 : 1e-2;
  const double coarse = detail::central_difference(ramp, theta, i, h);
  const double fine = detail::central_difference(ramp, theta, i, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

inline std::string ramp_label(const RampSpec& ramp) {
  if (ramp.kind == RampKind::exponential) return "exp";
  return "poly:" + std::to_string(ramp.order);
}

/// Parses "poly:<n>" or "exp".
inline RampSpec parse_ramp(const std::string& label) {
  if (label == "exp") return make_exp_ramp();
  const std::string prefix = "poly:";
  if (label.rfind(prefix, 0) == 0) {
    const std::string arg = label.substr(prefix.size());
    try {
      std::size_t pos = 0;
      const int n = std::stoi(arg, &pos);
      if (pos != arg.size() || n < 0) throw std::invalid_argument(arg);
      return make_poly_ramp(n);
    } catch (const std::exception&) {
      throw ConfigError("invalid ramp order in \"" + label + "\"");
    }
  }
  throw ConfigError("unknown ramp \"" + label + "\" (expected \"poly:<n>\" or \"exp\")");
}

}  // namespace optbal
