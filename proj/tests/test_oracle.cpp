#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "optbal/oracle.hpp"

using namespace optbal;

namespace {

using complexd = std::complex<double>;
const OscillatorSpec kSingleMode{{{1, {1.0, 0.0}}}};
const OscillatorSpec kThreeModes{{{1, {1.0, 0.0}}, {2, {0.25, 0.0}}, {3, {1.0 / 9.0, 0.0}}}};
const std::vector<double> kEpsGrid{0.1, 0.05, 0.025, 0.0125};

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mx += std::log(eps[i]) / n;
    my += std::log(err[i]) / n;
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sxx += (std::log(eps[i]) - mx) * (std::log(eps[i]) - mx);
    sxy += (std::log(eps[i]) - mx) * (std::log(err[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("exact slow manifold closed form") {
  // G_k = f_k / (i (k eps - 1)): for k=1, f_1=1, eps=0.1 this is
  // 1 / (-0.9 i) = (10/9) i.  (The published display carries a spurious
  // factor eps; the value here is the one consistent with the oscillator
  // ODE eps p' = i p + f, which the quadrature cross-check below pins.)
  const complexd g = oscillator_exact_slow(kSingleMode, 0.1, 0.0);
  CHECK(g.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.imag() == doctest::Approx(10.0 / 9.0).epsilon(1e-14));

  // no coupling, no manifold
  CHECK(std::abs(oscillator_exact_slow(OscillatorSpec{}, 0.1, 0.7)) == 0.0);

  // eps -> 0: the slaving relation p = i f(theta), mirroring g_0 != 0 of the
  // toy model; the published eps-weighted display would vanish instead
  CHECK(std::abs(oscillator_exact_slow(kSingleMode, 1e-4, 0.3)) ==
        doctest::Approx(1.0).epsilon(2e-4));

  CHECK_THROWS_AS(oscillator_exact_slow(kSingleMode, 0.95, 0.0), Error);
}

TEST_CASE("balanced p(T): degenerate zero ramp integrates to zero") {
  const RampSpec zero{RampKind::polynomial, 0, {0.0}};
  CHECK(std::abs(oscillator_balanced_pT(kSingleMode, zero, 0.1, 1.0, 0.4)) == 0.0);
}

TEST_CASE("quadrature matches time integration of the oscillator field") {
  // Two independent computations of the same BVP solution.  RK4 at
  // kappa = 80 sits at ~2e-10 for this configuration, well under 1e-8.
  const RampSpec ramp = make_poly_ramp(2);
  const complexd quad = oscillator_balanced_pT(kSingleMode, ramp, 0.1, 1.0, 0.0);
  const auto nudge80 = oscillator_nudge(kSingleMode, ramp, 0.1, 1.0, 0.0, {0.3, -0.2}, 3, 1e-14, 80);
  CHECK(std::abs(nudge80.iterates[1] - quad) <= 1e-8);
}

TEST_CASE("quadrature self-consistency under panel doubling") {
  const RampSpec ramp = make_poly_ramp(2);
  for (double eps : kEpsGrid) {
    const complexd a = oscillator_balanced_pT(kThreeModes, ramp, eps, 1.0, 0.3, 40);
    const complexd b = oscillator_balanced_pT(kThreeModes, ramp, eps, 1.0, 0.3, 80);
    CHECK(std::abs(a - b) <= 1e-10);
  }
}

TEST_CASE("integration-by-parts identity") {
  // One integration by parts of the p(T) integral peels off exactly G, so
  //   p(T) - G = -(f1 e^{i th*} / (i(k eps - 1))) e^{i(1/eps - k)T}
  //              (1/T) int_0^T e^{(ik - i/eps) t} rho'(t/T) dt.
  // Both sides computed by quadrature must agree; the ramp derivative is
  // exact for the polynomial kind.
  const RampSpec ramp = make_poly_ramp(1);
  const double T = 1.0, theta_star = 0.55;
  const int k = 1;
  for (double eps : {0.1, 0.025}) {
    const complexd lhs =
        oscillator_balanced_pT(kSingleMode, ramp, eps, T, theta_star) -
        oscillator_exact_slow(kSingleMode, eps, theta_star);

    const complexd i_unit(0.0, 1.0);
    const complexd a = i_unit * (k - 1.0 / eps);
    complexd integral = 0.0;
    const int panels = 200 * static_cast<int>(std::ceil(0.1 / eps));
    for (int panel = 0; panel < panels; ++panel) {
      const double lo = T * panel / panels, hi = T * (panel + 1) / panels;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int g = 0; g < 8; ++g) {
        const double t = mid + half * detail::kGaussNodes[g];
        integral += detail::kGaussWeights[g] * half * std::exp(a * t) *
                    eval_ramp_derivative(ramp, t / T, 1);
      }
    }
    const complexd rhs = -(1.0 / (i_unit * (k * eps - 1.0))) *
                         std::exp(i_unit * ((1.0 / eps - k) * T)) *
                         std::exp(i_unit * (k * theta_star)) * integral / T;
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("balance error of the quadrature against the exact manifold") {
  // |p(T) - G| is bounded by C eps^{n+1} for a poly:n ramp.  The measured
  // points carry strong phase modulation (the boundary terms of successive
  // integrations by parts beat against each other), so only the n = 2 slope
  // is stable on this grid; for n = 1 we assert the bound with the measured
  // envelope constant.
  for (int n : {1, 2}) {
    const RampSpec ramp = make_poly_ramp(n);
    std::vector<double> errs;
    for (double eps : kEpsGrid) {
      errs.push_back(std::abs(oscillator_balanced_pT(kSingleMode, ramp, eps, 1.0, 0.0) -
                              oscillator_exact_slow(kSingleMode, eps, 0.0)));
      CHECK(errs.back() <= 400.0 * std::pow(eps, n + 1));
    }
    if (n == 2) {
      const double slope = loglog_slope(kEpsGrid, errs);
      CHECK(slope >= 2.4);
      CHECK(slope <= 3.6);
    }
  }
}

TEST_CASE("oscillator nudging converges in one cycle") {
  const RampSpec ramp = make_poly_ramp(2);
  const double eps = 0.1, T = 1.0, theta_star = 0.7;
  // theta' = 1 integrates exactly, so the forward leg never depends on the
  // incoming p: p_1 equals the quadrature solution and p_2 equals p_1.
  const auto res = oscillator_nudge(kSingleMode, ramp, eps, T, theta_star, {0.4, 0.1}, 10, 1e-12, 160);
  REQUIRE(res.iterates.size() >= 3);
  const complexd quad = oscillator_balanced_pT(kSingleMode, ramp, eps, T, theta_star);
  CHECK(std::abs(res.iterates[1] - quad) <= 1e-10);
  CHECK(res.iterates[2] == res.iterates[1]);
  CHECK(res.converged);
  CHECK(res.update_norms.size() == 2);
  CHECK(res.final == res.iterates.back());
}

TEST_CASE("oscillator nudging with no coupling returns zero") {
  const auto res = oscillator_nudge(OscillatorSpec{}, make_poly_ramp(1), 0.1, 1.0, 0.0, {1.0, 1.0});
  CHECK(res.iterates[1] == complexd{0.0, 0.0});
}

TEST_CASE("exponential ramp: super-algebraic decay of the one-cycle limit") {
  const RampSpec ramp = make_exp_ramp();
  std::vector<double> errs;
  for (double eps : kEpsGrid) {
    const auto res = oscillator_nudge(kSingleMode, ramp, eps, 1.0, 0.0, {0.0, 0.0}, 2, 1e-14, 40);
    errs.push_back(std::abs(res.final - oscillator_exact_slow(kSingleMode, eps, 0.0)));
  }
  // local log-log slopes grow as eps shrinks
  const double first = std::log(errs[0] / errs[1]) / std::log(kEpsGrid[0] / kEpsGrid[1]);
  const double last = std::log(errs[2] / errs[3]) / std::log(kEpsGrid[2] / kEpsGrid[3]);
  CHECK(last > first);
  CHECK(errs.back() < errs.front() * 1e-2);
}

TEST_CASE("panel count scales with T/eps") {
  CHECK(detail::oscillatory_panel_count(0.0125, 1.0, 40) >= 509);
  CHECK(detail::oscillatory_panel_count(0.1, 1.0, 40) >= 64);
  CHECK(detail::oscillatory_panel_count(0.1, 2.0, 40) >=
        2 * detail::oscillatory_panel_count(0.1, 1.0, 40) - 1);
}

TEST_CASE("resonance guard applies to every entry point") {
  CHECK_THROWS_AS(oscillator_balanced_pT(kThreeModes, make_poly_ramp(1), 0.5, 1.0, 0.0), Error);
  CHECK_THROWS_AS(oscillator_nudge(kThreeModes, make_poly_ramp(1), 1.0 / 3.0, 1.0, 0.0, {0, 0}),
                  Error);
}
