#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <vector>

#include "optbal/errors.hpp"
#include "optbal/ramp.hpp"
#include "optbal/vec.hpp"

namespace optbal {

enum class PotentialKind { quadratic, quartic, custom_poly };

/// Potential V(q) with an analytic gradient.
///  - quadratic:    V = |q|^2 / 2
///  - quartic:      V = |q|^2 / 2 + lambda |q|^4 / 4
///  - custom_poly:  V = sum_d sum_j c_j q_d^j  (j starting at 1), a
///    coordinate-wise polynomial; odd terms give asymmetric experiments.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::quadratic;
  double lambda = 1.0;          // quartic kind only
  std::vector<double> coeffs;   // custom_poly kind: c_1, c_2, ...
};

inline PotentialSpec quadratic_potential() { return {PotentialKind::quadratic, 1.0, {}}; }

inline PotentialSpec quartic_potential(double lambda = 1.0) {
  return {PotentialKind::quartic, lambda, {}};
}

inline PotentialSpec polynomial_potential(std::vector<double> coeffs) {
  return {PotentialKind::custom_poly, 1.0, std::move(coeffs)};
}

template <class S>
inline VecT<S> grad_potential_t(const PotentialSpec& pot, const VecT<S>& q) {
  switch (pot.kind) {
    case PotentialKind::quadratic:
      return q;
    case PotentialKind::quartic: {
      S norm_sq = scalar_const<S>(0.0);
      for (const auto& x : q) norm_sq = norm_sq + x * x;
      VecT<S> out;
      out.reserve(q.size());
      for (const auto& x : q) out.push_back(x * (1.0 + pot.lambda * norm_sq));
      return out;
    }
    case PotentialKind::custom_poly: {
      VecT<S> out;
      out.reserve(q.size());
      for (const auto& x : q) {
        // d/dx sum_j c_j x^j = sum_j j c_j x^{j-1}, Horner from the top
        S acc = scalar_const<S>(0.0);
        for (std::size_t j = pot.coeffs.size(); j-- > 0;) {
          acc = acc * x + static_cast<double>(j + 1) * pot.coeffs[j];
        }
        out.push_back(acc);
      }
      return out;
    }
  }
  std::abort();
}

inline Vector grad_potential(const PotentialSpec& pot, const Vector& q) {
  return grad_potential_t<double>(pot, q);
}

/// The fast-slow toy model q' = p, eps p' = J p - grad V(q) on one even
/// phase dimension D shared by q, p, and J.
struct SystemSpec {
  int dim = 2;  // D, even
  PotentialSpec potential;
};

inline SystemSpec make_system(int dim, PotentialSpec pot) {
  if (dim <= 0 || dim % 2 != 0)
    throw Error("make_system: phase dimension must be a positive even integer");
  return SystemSpec{dim, std::move(pot)};
}

/// Standard symplectic matrix [[0, I], [-I, 0]] on R^D, D even.
inline Matrix symplectic_matrix(int dim) {
  if (dim <= 0 || dim % 2 != 0)
    throw Error("symplectic_matrix: dimension must be a positive even integer");
  Matrix j(dim, dim);
  const int h = dim / 2;
  for (int i = 0; i < h; ++i) {
    j(i, h + i) = 1.0;
    j(h + i, i) = -1.0;
  }
  return j;
}

struct PhaseState {
  Vector q;
  Vector p;
  double t = 0.0;
};

struct PhaseDeriv {
  Vector dq;
  Vector dp;
};

/// Right-hand side of the ramped system: q' = p, p' = (J p - rho(t/T) grad V(q)) / eps.
inline PhaseDeriv ramped_vector_field(const SystemSpec& sys, const RampSpec& ramp, double eps,
                                      double ramp_time, const PhaseState& state) {
  if (!(eps > 0.0)) throw Error("ramped_vector_field: eps must be positive");
  if (!(ramp_time > 0.0)) throw Error("ramped_vector_field: ramp time must be positive");
  const double rho = eval_ramp(ramp, state.t / ramp_time);
  Vector dp = apply_symplectic(state.p);
  const Vector grad = grad_potential(sys.potential, state.q);
  for (int i = 0; i < sys.dim; ++i) dp[i] = (dp[i] - rho * grad[i]) / eps;
  return {state.p, std::move(dp)};
}

/// Action-angle oscillator: theta' = 1, eps p' = i p + rho(t/T) f(theta),
/// with coupling f given by a finite Fourier mode set.
struct OscillatorMode {
  int wavenumber = 0;
  std::complex<double> amplitude;
};

struct OscillatorSpec {
  std::vector<OscillatorMode> modes;
};

inline constexpr double kResonanceMargin = 0.1;

/// The oscillator estimates require |k*eps - 1| bounded away from zero.
inline void check_resonance(const OscillatorSpec& osc, double eps) {
  for (const auto& m : osc.modes) {
    if (std::abs(m.wavenumber * eps - 1.0) < kResonanceMargin)
      throw Error("oscillator: eps = " + std::to_string(eps) + " too close to resonance 1/" +
                  std::to_string(m.wavenumber));
  }
}

inline std::complex<double> oscillator_coupling(const OscillatorSpec& osc, double theta) {
  std::complex<double> f = 0.0;
  for (const auto& m : osc.modes)
    f += m.amplitude * std::exp(std::complex<double>(0.0, m.wavenumber * theta));
  return f;
}

struct OscState {
  double theta = 0.0;
  std::complex<double> p;
  double t = 0.0;
};

struct OscDeriv {
  double dtheta = 1.0;
  std::complex<double> dp;
};

inline OscDeriv oscillator_vector_field(const OscillatorSpec& osc, const RampSpec& ramp,
                                        double eps, double ramp_time, const OscState& state) {
  if (!(eps > 0.0)) throw Error("oscillator_vector_field: eps must be positive");
  const double rho = eval_ramp(ramp, state.t / ramp_time);
  const std::complex<double> f = oscillator_coupling(osc, state.theta);
  return {1.0, (std::complex<double>(0.0, 1.0) * state.p + rho * f) / eps};
}

/// Parses "quad", "quad+quart:<lambda>", or "poly:<c1,c2,...>".
inline PotentialSpec parse_potential(const std::string& label) {
  if (label == "quad") return quadratic_potential();
  const std::string quart = "quad+quart:";
  if (label.rfind(quart, 0) == 0) {
    const std::string arg = label.substr(quart.size());
    try {
      std::size_t pos = 0;
      const double lambda = std::stod(arg, &pos);
      if (pos != arg.size()) throw std::invalid_argument(arg);
      return quartic_potential(lambda);
    } catch (const std::exception&) {
      throw ConfigError("invalid quartic coefficient in \"" + label + "\"");
    }
  }
  const std::string poly = "poly:";
  if (label.rfind(poly, 0) == 0) {
    std::vector<double> coeffs;
    std::string rest = label.substr(poly.size());
    std::size_t start = 0;
    while (start <= rest.size()) {
      const std::size_t comma = rest.find(',', start);
      const std::string tok =
          rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        std::size_t pos = 0;
        coeffs.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("invalid coefficient \"" + tok + "\" in potential \"" + label + "\"");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return polynomial_potential(std::move(coeffs));
  }
  throw ConfigError("unknown potential \"" + label +
                    "\" (expected \"quad\", \"quad+quart:<lambda>\", or \"poly:<coeffs>\")");
}

}  // namespace optbal
