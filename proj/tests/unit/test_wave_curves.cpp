#include "balaw/errors.hpp"
#include "balaw/wave_curves.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace balaw;

namespace {

State vec(std::initializer_list<double> xs) {
  State u(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) u[i++] = x;
  return u;
}

double p2(double tau) { return kPSystemGamma * (kPSystemGamma + 1.0) * std::pow(tau, -kPSystemGamma - 2.0); }
double sound(double tau) { return std::sqrt(-psystem_pressure_derivative(tau)); }

// Closed-form p-system eigenstructure: lambda_1 = -c(tau), lambda_2 = c(tau),
// r_1 ~ (1, c), r_2 ~ (-1, c); both oriented so that lambda_j increases along r_j.
double psys_lambda(int j, const State& u) { return j == 0 ? -sound(1.0 + u[0]) : sound(1.0 + u[0]); }

State psys_tangent(int j, const State& u, double k) {
  const double tau = 1.0 + u[0];
  const double c = sound(tau);
  State r(2);
  if (j == 0)
    r << 1.0, c;
  else
    r << -1.0, c;
  // d lambda_1 / d tau = p''/(2c); d lambda_2 / d tau = -p''/(2c)
  const double dl = (j == 0 ? 1.0 : -1.0) * p2(tau) / (2.0 * c);
  return r * (k / (dl * r[0]));
}

// Adaptive embedded RK (Cash-Karp 4/5) with local error control, used as oracle.
State adaptive_integrate(const std::function<State(const State&)>& rhs, State y, double length, double tol) {
  double t = 0.0;
  double h = length / 16.0;
  const double sgn = length < 0 ? -1.0 : 1.0;
  while (sgn * (length - t) > 1e-18) {
    if (sgn * (t + h - length) > 0) h = length - t;
    const State k1 = rhs(y);
    const State k2 = rhs(y + h * (0.2 * k1));
    const State k3 = rhs(y + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
    const State k4 = rhs(y + h * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
    const State k5 = rhs(y + h * (-11.0 / 54 * k1 + 2.5 * k2 - 70.0 / 27 * k3 + 35.0 / 27 * k4));
    const State k6 = rhs(y + h * (1631.0 / 55296 * k1 + 175.0 / 512 * k2 + 575.0 / 13824 * k3 +
                                  44275.0 / 110592 * k4 + 253.0 / 4096 * k5));
    const State y5 = y + h * (37.0 / 378 * k1 + 250.0 / 621 * k3 + 125.0 / 594 * k4 + 512.0 / 1771 * k6);
    const State y4 = y + h * (2825.0 / 27648 * k1 + 18575.0 / 48384 * k3 + 13525.0 / 55296 * k4 +
                              277.0 / 14336 * k5 + 0.25 * k6);
    const double err = (y5 - y4).lpNorm<Eigen::Infinity>();
    if (err <= tol) {
      y = y5;
      t += h;
    }
    const double factor = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
    h *= std::clamp(factor, 0.2, 4.0);
  }
  return y;
}

double k_oracle(int j) {
  const double c = sound(1.0);
  // |grad lambda . r_hat| at the origin with r_hat = (+-1, c)/sqrt(1 + c^2)
  return p2(1.0) / (2.0 * c) / std::sqrt(1.0 + c * c);
}

}  // namespace

TEST(WaveCurves, ScalarCurvesAreTranslations) {
  const HyperbolicSystem sys = preset(Preset::ScalarConvex);
  for (double u0 : {-0.2, 0.0, 0.1}) {
    for (double s : {-0.1, -0.01, 0.0, 0.03, 0.1}) {
      EXPECT_NEAR(rarefaction_curve(sys, 0, s, vec({u0}))[0], u0 + s, 1e-14);
      const ShockPoint p = shock_curve(sys, 0, s, vec({u0}));
      EXPECT_NEAR(p.state[0], u0 + s, 1e-14);
      EXPECT_NEAR(p.speed, u0 + 1.0 + s / 2.0, 1e-14);
      EXPECT_NEAR(lax_curve(sys, 0, s, vec({u0}))[0], u0 + s, 1e-14);
    }
  }
}

TEST(WaveCurves, ZeroParameterIsIdentity) {
  for (const auto& name : preset_names()) {
    const HyperbolicSystem sys = preset(name);
    const State u = State::Constant(sys.dim(), 0.05);
    for (int j = 0; j < sys.dim(); ++j) {
      EXPECT_EQ(rarefaction_curve(sys, j, 0.0, u), u);
      EXPECT_EQ(shock_curve(sys, j, 0.0, u).state, u);
      EXPECT_EQ(lax_curve(sys, j, 0.0, u), u);
    }
    EXPECT_EQ(compose_psi(sys, StrengthVector::zero(sys.dim()), u), u);
    EXPECT_EQ(compose_shocks(sys, StrengthVector::zero(sys.dim()), u), u);
  }
}

TEST(WaveCurves, PSystemCurveRatesMatchClosedForm) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(sys.curve_rate(j), k_oracle(j), 1e-10);
}

TEST(WaveCurves, PSystemRarefactionMatchesAdaptiveOracle) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const State zero = State::Zero(2);
  for (int j = 0; j < 2; ++j) {
    const double k = k_oracle(j);
    for (double s : {0.01, 0.05}) {
      const State oracle = adaptive_integrate([&](const State& u) { return psys_tangent(j, u, k); }, zero, s, 1e-12);
      EXPECT_NEAR(psys_lambda(j, oracle) - psys_lambda(j, zero), k * s, 1e-10);
      const State r = rarefaction_curve(sys, j, s, zero);
      EXPECT_LE((r - oracle).lpNorm<Eigen::Infinity>(), 1e-10);
      EXPECT_NEAR(sys.eigen_decompose(r).lambdas[j] - sys.eigen_decompose(zero).lambdas[j], sys.curve_rate(j) * s, 1e-6);
    }
  }
}

TEST(WaveCurves, PSystemShockMatchesRankineHugoniotRootFind) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const State zero = State::Zero(2);
  const double sigma = -0.05;
  for (int j = 0; j < 2; ++j) {
    const ShockPoint p = shock_curve(sys, j, sigma, zero);
    EXPECT_LE(rh_residual(sys, zero, p.state, p.speed), 1e-9);

    // lambda depends only on tau: the parametrization fixes tau+ ...
    const double k = k_oracle(j);
    const double target = psys_lambda(j, zero) + k * sigma;
    double tau = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double c = sound(tau);
      const double lam = j == 0 ? -c : c;
      const double dlam = (j == 0 ? 1.0 : -1.0) * p2(tau) / (2.0 * c);
      tau -= (lam - target) / dlam;
    }
    // ... then (w+, s) solve the two Rankine-Hugoniot equations by Newton.
    const double dtau = tau - 1.0;
    double w = p.state[1] + 0.01, s = (j == 0 ? -1.0 : 1.0) * sound(1.0);
    for (int it = 0; it < 60; ++it) {
      const double f1 = -w - s * dtau;
      const double f2 = psystem_pressure(tau) - psystem_pressure(1.0) - s * w;
      // d/dw, d/ds
      const double a11 = -1.0, a12 = -dtau, a21 = -s, a22 = -w;
      const double det = a11 * a22 - a12 * a21;
      w -= (a22 * f1 - a12 * f2) / det;
      s -= (-a21 * f1 + a11 * f2) / det;
    }
    EXPECT_NEAR(p.state[0], dtau, 1e-9);
    EXPECT_NEAR(p.state[1], w, 1e-9);
    EXPECT_NEAR(p.speed, s, 1e-9);
  }
}

TEST(WaveCurves, LaxCurveSecondOrderTangency) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const State zero = State::Zero(2);
  for (int j = 0; j < 2; ++j) {
    const State r = sys.base_frame().r(j);
    std::vector<double> ratios;
    for (double s : {0.01, 0.02, 0.04, -0.01, -0.02, -0.04}) {
      const State psi = lax_curve(sys, j, s, zero);
      ratios.push_back((psi - zero - s * r).norm() / (s * s));
    }
    const double kmax = *std::max_element(ratios.begin(), ratios.end());
    const double kmin = *std::min_element(ratios.begin(), ratios.end());
    EXPECT_TRUE(std::isfinite(kmax));
    EXPECT_LT(kmax, 10.0);
    EXPECT_LT(kmax / kmin, 1.5);  // genuinely quadratic deviation
  }
}

TEST(WaveCurves, ShockAndRarefactionHaveSecondOrderContact) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const State u = vec({0.03, -0.02});
  for (int j = 0; j < 2; ++j) {
    const double d1 = (shock_curve(sys, j, 0.04, u).state - rarefaction_curve(sys, j, 0.04, u)).norm();
    const double d2 = (shock_curve(sys, j, 0.02, u).state - rarefaction_curve(sys, j, 0.02, u)).norm();
    EXPECT_NEAR(d1 / d2, 8.0, 1.0);  // third-order gap
  }
}

TEST(WaveCurves, LinearDiagonalRiemannIsLinear) {
  const HyperbolicSystem sys = preset(Preset::LinearDiagonal);
  const State um = vec({0.1, -0.2}), up = vec({-0.05, 0.3});
  const StrengthVector s = solve_riemann(sys, um, up);
  const State expected = sys.R_inv() * (up - um);
  EXPECT_LE((s.values - expected).norm(), 1e-12);
  EXPECT_LE((compose_psi(sys, StrengthVector(expected), um) - (um + sys.R() * expected)).norm(), 1e-14);

  const WaveFan fan = riemann_fan(sys, um, up);
  ASSERT_EQ(fan.waves.size(), 2u);
  EXPECT_EQ(fan.waves[0].kind, WaveKind::Contact);
  EXPECT_NEAR(fan.waves[0].speed_left, -1.0, 1e-14);
  EXPECT_NEAR(fan.waves[1].speed_left, 1.0, 1e-14);
  EXPECT_NEAR(fan.waves[0].strength, expected[0], 1e-12);
  EXPECT_NEAR(fan.waves[1].strength, expected[1], 1e-12);
  EXPECT_LE((fan.evaluate(0.0) - vec({-0.05, -0.2})).norm(), 1e-12);
}

TEST(WaveCurves, RiemannOfEqualStatesIsZero) {
  for (const auto& name : preset_names()) {
    const HyperbolicSystem sys = preset(name);
    const State u = State::Constant(sys.dim(), 0.02);
    const StrengthVector s = solve_riemann(sys, u, u);
    EXPECT_EQ(s.values, State::Zero(sys.dim()));
    EXPECT_TRUE(riemann_fan(sys, u, u).waves.empty());
  }
}

TEST(WaveCurves, ScalarShockFan) {
  const HyperbolicSystem sys = preset(Preset::ScalarConvex);
  const WaveFan fan = riemann_fan(sys, vec({0.2}), vec({-0.1}));
  ASSERT_EQ(fan.waves.size(), 1u);
  EXPECT_EQ(fan.waves[0].kind, WaveKind::Shock);
  EXPECT_NEAR(fan.waves[0].speed_left, (0.2 - 0.1) / 2.0 + 1.0, 1e-12);
  EXPECT_NEAR(invert_shocks(sys, vec({0.2}), vec({-0.1}))[0], -0.3, 1e-12);

  const WaveFan rare = riemann_fan(sys, vec({-0.1}), vec({0.2}));
  ASSERT_EQ(rare.waves.size(), 1u);
  EXPECT_EQ(rare.waves[0].kind, WaveKind::Rarefaction);
  EXPECT_NEAR(rare.evaluate(1.0)[0], 0.0, 1e-12);  // xi = u + 1 inside the fan
}

TEST(WaveCurves, PSystemRoundTrips) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> du(-0.1, 0.1), ds(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const State um = vec({du(rng), du(rng)});
    StrengthVector sigma(vec({ds(rng), ds(rng)}));
    sigma.values *= 0.05 * std::abs(ds(rng)) / sigma.l1();
    const State up = compose_psi(sys, sigma, um);
    EXPECT_LE((solve_riemann(sys, um, up).values - sigma.values).lpNorm<Eigen::Infinity>(), 1e-8);
    const State uq = compose_shocks(sys, sigma, um);
    EXPECT_LE((invert_shocks(sys, um, uq).values - sigma.values).lpNorm<Eigen::Infinity>(), 1e-8);
    EXPECT_LE((compose_psi(sys, solve_riemann(sys, um, uq), um) - uq).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(WaveCurves, EmittedShocksSatisfyRankineHugoniot) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> du(-0.1, 0.1);
  for (int k = 0; k < 50; ++k) {
    const State um = vec({du(rng), du(rng)});
    const State up = um + 0.3 * vec({du(rng), du(rng)});
    const WaveFan fan = riemann_fan(sys, um, up);
    for (const Wave& w : fan.waves) {
      if (w.kind == WaveKind::Shock) EXPECT_LE(w.rh_residual, 1e-9);
      if (w.kind == WaveKind::Rarefaction) EXPECT_LT(w.speed_left, w.speed_right);
    }
    for (std::size_t i = 1; i < fan.waves.size(); ++i) EXPECT_LE(fan.waves[i - 1].speed_right, fan.waves[i].speed_left);
  }
}

TEST(WaveCurves, CurveLeavingDomainThrows) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  EXPECT_THROW(rarefaction_curve(sys, 0, 0.6, State::Zero(2)), LeftDomain);
  EXPECT_THROW(shock_curve(sys, 0, -0.6, State::Zero(2)), LeftDomain);
  EXPECT_THROW(solve_riemann(sys, State::Zero(2), vec({0.4, 0.0})), LeftDomain);
}
