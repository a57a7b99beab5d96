#include "balaw/errors.hpp"
#include "balaw/hyperbolic_system.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace balaw;

namespace {

State vec(std::initializer_list<double> xs) {
  State u(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) u[i++] = x;
  return u;
}

// Independent eigen oracle for 2x2 systems: central-difference Jacobian of the flux,
// roots of the characteristic polynomial, eigenvectors from the null space of A - lambda I.
struct OracleFrame {
  double lambda[2];
  State r[2];
};

OracleFrame oracle_frame(const HyperbolicSystem& sys, const State& u) {
  const double h = 1e-5;
  double a[2][2];
  for (int k = 0; k < 2; ++k) {
    State up = u, um = u;
    up[k] += h;
    um[k] -= h;
    const State d = (sys.flux(up) - sys.flux(um)) / (2 * h);
    a[0][k] = d[0];
    a[1][k] = d[1];
  }
  const double tr = a[0][0] + a[1][1];
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double disc = std::sqrt(tr * tr - 4 * det);
  OracleFrame out;
  out.lambda[0] = 0.5 * (tr - disc);
  out.lambda[1] = 0.5 * (tr + disc);
  for (int j = 0; j < 2; ++j) {
    // (a00 - l) x + a01 y = 0 with x = 1 when a01 != 0
    State v(2);
    if (std::abs(a[0][1]) > 1e-12) {
      v << 1.0, -(a[0][0] - out.lambda[j]) / a[0][1];
    } else {
      v << -(a[1][1] - out.lambda[j]) / a[1][0], 1.0;
    }
    out.r[j] = v / v.norm();
  }
  return out;
}

}  // namespace

TEST(HyperbolicSystem, LinearDiagonalFrameIsIdentity) {
  const HyperbolicSystem sys = preset(Preset::LinearDiagonal);
  const EigenFrame f = eigen_decompose(sys, vec({0.0, 0.0}));
  EXPECT_DOUBLE_EQ(f.lambdas[0], -1.0);
  EXPECT_DOUBLE_EQ(f.lambdas[1], 1.0);
  EXPECT_TRUE(f.right.isApprox(Matrix::Identity(2, 2)));
  EXPECT_TRUE(f.left.isApprox(Matrix::Identity(2, 2)));
  EXPECT_EQ(sys.field_kind(0), FieldKind::LinearlyDegenerate);
  EXPECT_EQ(sys.field_kind(1), FieldKind::LinearlyDegenerate);
}

TEST(HyperbolicSystem, ScalarSpeedIsDerivative) {
  const HyperbolicSystem sys = preset(Preset::ScalarConvex);
  ASSERT_EQ(sys.dim(), 1);
  const EigenFrame f = sys.eigen_decompose(vec({0.3}));
  EXPECT_DOUBLE_EQ(f.lambdas[0], 1.3);
  EXPECT_DOUBLE_EQ(f.right(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.left(0, 0), 1.0);
  EXPECT_EQ(sys.field_kind(0), FieldKind::GenuinelyNonlinear);
  EXPECT_DOUBLE_EQ(sys.curve_rate(0), 1.0);
}

TEST(HyperbolicSystem, PSystemBaseFrameMatchesOracle) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const State zero = State::Zero(2);
  const EigenFrame f = sys.eigen_decompose(zero);
  const double c = std::sqrt(-psystem_pressure_derivative(1.0));
  EXPECT_NEAR(f.lambdas[0], -c, 1e-14);
  EXPECT_NEAR(f.lambdas[1], c, 1e-14);
  const OracleFrame o = oracle_frame(sys, zero);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(f.lambdas[j], o.lambda[j], 1e-8);
    const double sign = f.r(j).dot(o.r[j]) > 0 ? 1.0 : -1.0;
    EXPECT_LE((f.r(j) - sign * o.r[j]).norm(), 1e-8);
    EXPECT_NEAR(f.r(j).norm(), 1.0, 1e-14);
  }
  EXPECT_EQ(sys.field_kind(0), FieldKind::GenuinelyNonlinear);
  EXPECT_EQ(sys.field_kind(1), FieldKind::GenuinelyNonlinear);
}

TEST(HyperbolicSystem, PSystemSampledFramesMatchOracle) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  for (int k = 0; k < 50; ++k) {
    const State u = vec({d(rng), d(rng)});
    const EigenFrame f = sys.eigen_decompose(u);
    const OracleFrame o = oracle_frame(sys, u);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(f.lambdas[j], o.lambda[j], 1e-8);
      const double sign = f.r(j).dot(o.r[j]) > 0 ? 1.0 : -1.0;
      EXPECT_LE((f.r(j) - sign * o.r[j]).norm(), 1e-8);
    }
  }
}

TEST(HyperbolicSystem, SignConvention) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const EigenFrame& base = sys.base_frame();
  for (int j = 0; j < 2; ++j) {
    Eigen::Index imax;
    base.right.col(j).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(base.right(imax, j), 0.0);
    // lambda_j increases along r_j for GNL fields
    EXPECT_GT(sys.curve_rate(j), 0.0);
  }
}

TEST(HyperbolicSystem, EigenpairResidualAndDuality) {
  for (const auto& name : preset_names()) {
    const HyperbolicSystem sys = preset(name);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-sys.omega_radius(), sys.omega_radius());
    for (int k = 0; k < 100; ++k) {
      State u(sys.dim());
      for (int i = 0; i < sys.dim(); ++i) u[i] = d(rng);
      const EigenFrame f = sys.eigen_decompose(u);
      const Matrix a = sys.jacobian(u);
      for (int j = 0; j < sys.dim(); ++j) {
        EXPECT_LE((a * f.r(j) - f.lambdas[j] * f.r(j)).norm(), 1e-8 * (1.0 + a.norm())) << name;
        if (j + 1 < sys.dim()) EXPECT_LT(f.lambdas[j], f.lambdas[j + 1]);
      }
      EXPECT_LE((f.left * f.right - Matrix::Identity(sys.dim(), sys.dim())).norm(), 1e-12) << name;
    }
  }
}

TEST(HyperbolicSystem, EigenvectorsContinuousAlongPaths) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.24, 0.24);
  for (int path = 0; path < 20; ++path) {
    const State a = vec({d(rng), d(rng)});
    const State b = vec({d(rng), d(rng)});
    EigenFrame prev = sys.eigen_decompose(a);
    for (int s = 1; s <= 100; ++s) {
      const EigenFrame f = sys.eigen_decompose(a + (b - a) * (s / 100.0));
      for (int j = 0; j < 2; ++j) EXPECT_GT(f.r(j).dot(prev.r(j)), 0.0);
      prev = f;
    }
  }
}

TEST(HyperbolicSystem, GenuineNonlinearityHoldsOnSamples) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.25, 0.25);
  for (int k = 0; k < 100; ++k) {
    const State u = vec({d(rng), d(rng)});
    for (int j = 0; j < 2; ++j) {
      const double nl = sys.nonlinearity(u, j);
      EXPECT_GT(nl, 0.0);
      // finite-difference check of grad(lambda_j) . r_j
      const EigenFrame f = sys.eigen_decompose(u);
      const double h = 1e-6;
      const double fd = (sys.eigen_decompose(u + h * f.r(j)).lambdas[j] - sys.eigen_decompose(u - h * f.r(j)).lambdas[j]) / (2 * h);
      EXPECT_NEAR(nl, fd, 1e-7);
    }
  }
  const HyperbolicSystem lin = preset(Preset::LinearDiagonal);
  EXPECT_NEAR(lin.nonlinearity(vec({0.1, -0.2}), 0), 0.0, 1e-14);
}

TEST(HyperbolicSystem, FiniteDifferenceFallbackAgreesWithAnalytic) {
  SystemDefinition def;
  def.name = "PSystemFD";
  def.n = 2;
  def.flux = [](const State& u) {
    State f(2);
    f << -u[1], psystem_pressure(1.0 + u[0]);
    return f;
  };
  def.kinds = {FieldKind::GenuinelyNonlinear, FieldKind::GenuinelyNonlinear};
  def.omega_radius = 0.25;
  const HyperbolicSystem fd(def);
  const HyperbolicSystem exact = preset(Preset::PSystem);
  const State u = vec({0.05, -0.03});
  EXPECT_LE((fd.jacobian(u) - exact.jacobian(u)).norm(), 1e-8);
  const EigenFrame a = fd.eigen_decompose(u), b = exact.eigen_decompose(u);
  EXPECT_LE((a.lambdas - b.lambdas).norm(), 1e-8);
  EXPECT_LE((a.right - b.right).norm(), 1e-8);
  EXPECT_NEAR(fd.curve_rate(0), exact.curve_rate(0), 1e-5);
}

TEST(HyperbolicSystem, Errors) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  EXPECT_THROW(sys.eigen_decompose(vec({0.3, 0.0})), NotInDomain);
  EXPECT_THROW(preset("Euler"), UnknownPreset);
  EXPECT_THROW(sys.decompose_matrix(Matrix::Identity(2, 2)), NotStrictlyHyperbolic);

  SystemDefinition degenerate;
  degenerate.name = "Identity";
  degenerate.n = 2;
  degenerate.flux = [](const State& u) { return u; };
  degenerate.kinds = {FieldKind::LinearlyDegenerate, FieldKind::LinearlyDegenerate};
  EXPECT_THROW(HyperbolicSystem{degenerate}, NotStrictlyHyperbolic);

  SystemDefinition wrong_kind;
  wrong_kind.name = "LinearClaimedGNL";
  wrong_kind.n = 1;
  wrong_kind.flux = [](const State& u) { return State(2.0 * u); };
  wrong_kind.kinds = {FieldKind::GenuinelyNonlinear};
  EXPECT_THROW(HyperbolicSystem{wrong_kind}, ConfigError);
}

TEST(HyperbolicSystem, SpeedRangeCoversBaseSpeeds) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  EXPECT_LE(sys.min_speed(), sys.base_frame().lambdas[0]);
  EXPECT_GE(sys.max_speed(), sys.base_frame().lambdas[1]);
}
