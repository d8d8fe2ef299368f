#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "optbal/model.hpp"
#include "optbal/ramp.hpp"
#include "optbal/series.hpp"
#include "optbal/vec.hpp"

using namespace optbal;

namespace {

Vector random_unit_ball(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector q(dim);
  double n;
  do {
    for (auto& x : q) x = u(rng);
    n = norm2(q);
  } while (n > 1.0 || n < 1e-3);
  return q;
}

double rel_err(const Vector& got, const Vector& want) {
  return norm2(vsub(got, want)) / std::max(1e-300, norm2(want));
}

}  // namespace

TEST_CASE("quadratic potential: hand recursion g_0 = -Jq, g_1 = Jq, g_2 = -2Jq") {
  const SystemSpec sys = make_system(2, quadratic_potential());
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector q = random_unit_ball(rng, 2);
    const Vector jq = apply_symplectic(q);
    const auto g = g_coefficients(sys, 2, q);
    CHECK(rel_err(g[0], vscale(jq, -1.0)) <= 1e-14);
    CHECK(rel_err(g[1], jq) <= 1e-14);
    CHECK(rel_err(g[2], vscale(jq, -2.0)) <= 1e-14);
  }
}

TEST_CASE("quadratic potential: g_k = (-1)^{k+1} Catalan_k J q to high order") {
  // For V = |q|^2/2 the recursion collapses to m_k = sum m_i m_j with
  // m_0 = -1, i.e. signed Catalan numbers.  Exact for any D and q.
  const double catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  const SystemSpec sys = make_system(4, quadratic_potential());
  const Vector q{0.3, -0.7, 0.2, 0.9};
  const Vector jq = apply_symplectic(q);
  const auto g = g_coefficients(sys, 8, q);
  for (int k = 0; k <= 8; ++k) {
    const double m = ((k % 2 == 0) ? -1.0 : 1.0) * catalan[k];
    CHECK(rel_err(g[static_cast<std::size_t>(k)], vscale(jq, m)) <= 1e-12);
  }
}

TEST_CASE("slow manifold point: G_2(q) = (-1 + eps - 2 eps^2) J q for quadratic V") {
  const SystemSpec sys = make_system(2, quadratic_potential());
  const Vector q{0.8, -0.4};
  const Vector jq = apply_symplectic(q);
  for (double eps : {0.1, 0.05, 0.3}) {
    const Vector got = slow_manifold_point(sys, 2, eps, q);
    const Vector want = vscale(jq, -1.0 + eps - 2.0 * eps * eps);
    CHECK(rel_err(got, want) <= 1e-14);
  }
  // n = 0 is g_0 = -J grad V, and eps = 0 collapses any order to g_0
  CHECK(rel_err(slow_manifold_point(sys, 0, 0.25, q), vscale(jq, -1.0)) <= 1e-15);
  CHECK(rel_err(slow_manifold_point(sys, 5, 0.0, q), vscale(jq, -1.0)) <= 1e-15);
}

TEST_CASE("series annihilates on zero data") {
  const SystemSpec zero_v = make_system(2, polynomial_potential({0.0}));
  const auto g = g_coefficients(zero_v, 4, {0.5, 0.7});
  for (const auto& c : g) CHECK(norm2(c) == 0.0);

  // quartic potential at q = 0: g_0 = 0 and the recursion annihilates
  const SystemSpec quart = make_system(2, quartic_potential(1.0));
  const auto g0 = g_coefficients(quart, 4, {0.0, 0.0});
  for (const auto& c : g0) CHECK(norm2(c) == 0.0);

  const auto f = f_coefficients(zero_v, make_poly_ramp(2), 1.0, 3, {0.5, 0.7}, 0.4);
  for (const auto& c : f) CHECK(norm2(c) == 0.0);
}

TEST_CASE("directional derivatives in the recursion match central differences") {
  // The invariant behind the dual-number machinery: Dg_i(q) v and the
  // (Df_i v, dt f_i) pair agree with central differences of the public
  // coefficient functions to 1e-6 relative on the unit ball.
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const RampSpec ramp = make_poly_ramp(2);
  const double T = 1.0, h = 1e-5;
  std::mt19937_64 rng(42);
  for (int order = 0; order <= 3; ++order) {
    for (int rep = 0; rep < 5; ++rep) {
      const Vector q = random_unit_ball(rng, 2);
      const Vector v = random_unit_ball(rng, 2);
      const double t = 0.3 + 0.05 * rep;

      // JVP of g via one dual level on the public output
      {
        using D1 = Dual<double>;
        const auto probe = detail::g_coeff_rec<D1>(sys.potential, order, seed_direction(q, v));
        const Vector jvp = derivative_parts(probe);
        const auto plus = g_coefficients(sys, order, vaxpy(q, h, v));
        const auto minus = g_coefficients(sys, order, vaxpy(q, -h, v));
        const Vector fd = vscale(vsub(plus[order], minus[order]), 0.5 / h);
        CHECK(rel_err(jvp, fd) <= 1e-6);
      }
      // JVP and time derivative of f
      {
        using D1 = Dual<double>;
        const auto probe = detail::f_coeff_rec<D1>(sys.potential, ramp, T, order,
                                                   seed_direction(q, v), D1{t, 0.0});
        const Vector jvp = derivative_parts(probe);
        const auto plus = f_coefficients(sys, ramp, T, order, vaxpy(q, h, v), t);
        const auto minus = f_coefficients(sys, ramp, T, order, vaxpy(q, -h, v), t);
        const Vector fd = vscale(vsub(plus[order], minus[order]), 0.5 / h);
        CHECK(rel_err(jvp, fd) <= 1e-6);

        const auto dt_probe = detail::f_coeff_rec<D1>(sys.potential, ramp, T, order,
                                                      seed_constant(q), D1{t, 1.0});
        const Vector dt = derivative_parts(dt_probe);
        const auto tp = f_coefficients(sys, ramp, T, order, q, t + h);
        const auto tm = f_coefficients(sys, ramp, T, order, q, t - h);
        const Vector fd_t = vscale(vsub(tp[order], tm[order]), 0.5 / h);
        CHECK(rel_err(dt, fd_t) <= 1e-6);
      }
    }
  }
}

TEST_CASE("ramped series with rho frozen at 1 reproduces the autonomous series") {
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const RampSpec frozen{RampKind::polynomial, 0, {1.0}};  // rho == 1
  const Vector q{0.4, 0.2};
  const auto g = g_coefficients(sys, 4, q);
  const auto f = f_coefficients(sys, frozen, 1.0, 4, q, 0.37);
  for (int k = 0; k <= 4; ++k) CHECK(rel_err(f[k], g[k]) <= 1e-15);
}

TEST_CASE("order-condition ramps glue F_n(q, T) to G_n(q)") {
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const Vector q{0.9, -0.2};
  const double T = 1.0;
  for (int n = 1; n <= 3; ++n) {
    const Vector fN = ramped_manifold_point(sys, make_poly_ramp(n), T, n, 0.1, q, T);
    const Vector gN = slow_manifold_point(sys, n, 0.1, q);
    CHECK(rel_err(fN, gN) <= 1e-12);
  }
  // exponential ramp satisfies every order
  const Vector f4 = ramped_manifold_point(sys, make_exp_ramp(), T, 4, 0.1, q, T);
  const Vector g4 = slow_manifold_point(sys, 4, 0.1, q);
  CHECK(rel_err(f4, g4) <= 1e-12);
  // and f_0(q, 0) = 0 because rho(0) = 0
  const auto f_at_zero = f_coefficients(sys, make_poly_ramp(2), T, 0, q, 0.0);
  CHECK(norm2(f_at_zero[0]) == 0.0);
}

TEST_CASE("remainder at order zero matches its closed form") {
  // R_0 = -dt f_0 - Df_0 f_0 with f_0 = -rho(t/T) J grad V.  For quadratic V
  // (Hessian = I):  dt f_0 = -(rho'(t/T)/T) J grad V,  Df_0 f_0 = -rho J f_0.
  const SystemSpec sys = make_system(2, quadratic_potential());
  const RampSpec ramp = make_poly_ramp(2);
  const double T = 1.0;
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector q = random_unit_ball(rng, 2);
    const double t = 0.1 + 0.08 * rep;
    const double rho = eval_ramp(ramp, t / T);
    const double drho = eval_ramp_derivative(ramp, t / T, 1) / T;
    const Vector jgrad = apply_symplectic(grad_potential(sys.potential, q));
    const Vector f0 = vscale(jgrad, -rho);
    const Vector dt_f0 = vscale(jgrad, -drho);
    const Vector df0_f0 = vscale(apply_symplectic(f0), -rho);
    const Vector want = vsub(vscale(dt_f0, -1.0), df0_f0);
    const Vector got = remainder(sys, ramp, T, 0, 0.1, q, t);
    CHECK(rel_err(got, want) <= 1e-12);
  }
  // V = 0 kills the remainder entirely
  const SystemSpec zero_v = make_system(2, polynomial_potential({0.0}));
  CHECK(norm2(remainder(zero_v, ramp, T, 2, 0.1, {0.4, 0.2}, 0.3)) == 0.0);
}

TEST_CASE("remainder scaling in eps") {
  // sup over a t-grid of |R_n| has log-log slope within n +- 0.4 over the
  // desk-scale eps grid (quartic potential, T = 1).
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const Vector q{1.0, 0.0};
  const std::vector<double> eps_grid{0.1, 0.05, 0.025, 0.0125};
  for (int n : {1, 2}) {
    const RampSpec ramp = make_poly_ramp(n);
    std::vector<double> sups;
    for (double eps : eps_grid) {
      double sup = 0.0;
      for (int i = 0; i <= 20; ++i)
        sup = std::max(sup, norm2(remainder(sys, ramp, 1.0, n, eps, q, i / 20.0)));
      sups.push_back(sup);
    }
    double sxy = 0, sxx = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      mx += std::log(eps_grid[i]) / 4;
      my += std::log(sups[i]) / 4;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      sxx += (std::log(eps_grid[i]) - mx) * (std::log(eps_grid[i]) - mx);
      sxy += (std::log(eps_grid[i]) - mx) * (std::log(sups[i]) - my);
    }
    const double slope = sxy / sxx;
    CHECK(slope >= n - 0.4);
    CHECK(slope <= n + 0.4);
  }
}

TEST_CASE("fast residual") {
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const RampSpec ramp = make_poly_ramp(2);
  const double T = 1.0, eps = 0.1;
  const Vector q{0.7, 0.3};

  // a state placed on the series manifold has zero residual
  PhaseState s{q, ramped_manifold_point(sys, ramp, T, 2, eps, q, 0.4), 0.4};
  CHECK(norm2(fast_residual(sys, ramp, T, 2, eps, s)) <= 1e-15);

  // t = T with p = G_n(q): zero via F_n(q,T) = G_n(q)
  PhaseState top{q, slow_manifold_point(sys, 2, eps, q), T};
  CHECK(norm2(fast_residual(sys, ramp, T, 2, eps, top)) <= 1e-13);

  // V = 0: F_n vanishes, the residual is p itself
  const SystemSpec zero_v = make_system(2, polynomial_potential({0.0}));
  PhaseState any{q, {0.3, -0.9}, 0.2};
  CHECK(fast_residual(zero_v, ramp, T, 2, eps, any) == any.p);
}

TEST_CASE("order caps") {
  const SystemSpec sys = make_system(2, quadratic_potential());
  const Vector q{0.5, 0.5};
  CHECK_THROWS_AS(g_coefficients(sys, 9, q), Error);             // default cap 8
  CHECK_THROWS_AS(g_coefficients(sys, -1, q), Error);
  CHECK_NOTHROW(g_coefficients(sys, 9, q, 10));                  // cap is overridable
  CHECK_NOTHROW(g_coefficients(sys, 10, q, 10));
  CHECK_THROWS_AS(g_coefficients(sys, 11, q, 12), Error);        // hard ceiling
  CHECK_THROWS_AS(f_coefficients(sys, make_poly_ramp(2), 1.0, 9, q, 0.5), Error);
  CHECK_NOTHROW(remainder(sys, make_poly_ramp(2), 1.0, 10, 0.1, q, 0.5, 10));
}

TEST_CASE("series eval bundle recomputes its own value") {
  const SystemSpec sys = make_system(2, quartic_potential(1.0));
  const double eps = 0.07;
  const SeriesEval ev = evaluate_slow_series(sys, 3, eps, {0.6, -0.1});
  Vector recomputed(2, 0.0);
  double w = 1.0;
  for (const auto& c : ev.coefficients) {
    recomputed = vaxpy(recomputed, w, c);
    w *= eps;
  }
  CHECK(rel_err(ev.value, recomputed) <= 1e-15);
  CHECK_FALSE(ev.remainder_norm.has_value());

  const SeriesEval rev = evaluate_ramped_series(sys, make_poly_ramp(2), 1.0, 2, eps, {0.6, -0.1}, 0.5);
  CHECK(rev.remainder_norm.has_value());
  CHECK(*rev.remainder_norm > 0.0);
}
