#include "balaw/errors.hpp"
#include "balaw/functionals.hpp"

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

PiecewiseConstantFn random_profile(std::mt19937_64& rng, int n, int jumps, double amp) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0), val(-amp, amp);
  std::vector<double> x;
  for (int k = 0; k < jumps; ++k) x.push_back(pos(rng));
  std::sort(x.begin(), x.end());
  std::vector<State> v{State::Zero(n)};
  for (int k = 0; k < jumps; ++k) {
    State s(n);
    for (int i = 0; i < n; ++i) s[i] = val(rng);
    v.push_back(s);
  }
  v.back().setZero();
  return PiecewiseConstantFn(x, v);
}

// All (x, i), (y, j) combinations checked against the definition directly.
double brute_force_interaction(const WaveDecomposition& d, const std::vector<FieldKind>& kinds) {
  double q = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x)
    for (std::size_t y = 0; y < d.size(); ++y)
      for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) {
          if (!(d.positions[x] < d.positions[y])) continue;
          const double a = d.strengths[x][i], b = d.strengths[y][j];
          const bool gnl = kinds[i] == FieldKind::GenuinelyNonlinear;
          if (i > j || (i == j && gnl && std::min(a, b) < 0.0)) q += std::abs(a * b);
        }
  return q;
}

double brute_force_bold_a(const WaveDecomposition& d, const std::vector<FieldKind>& kinds, int i, double q, double x) {
  double a = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double y = d.positions[k];
    for (int j = 0; j < d.n; ++j) {
      const double s = std::abs(d.strengths[k][j]);
      if (j < i && y > x) a += s;
      if (j > i && y <= x) a += s;
      if (j == i && kinds[i] == FieldKind::GenuinelyNonlinear) {
        if (q >= 0 && y > x) a += s;
        if (q < 0 && y <= x) a += s;
      }
    }
  }
  return a;
}

}  // namespace

TEST(Functionals, DecomposeExamples) {
  const HyperbolicSystem lin = preset(Preset::LinearDiagonal);
  EXPECT_EQ(decompose(lin, PiecewiseConstantFn(2)).size(), 0u);
  const PiecewiseConstantFn u({0.0, 1.0}, {vec({0, 0}), vec({0.1, -0.2}), vec({0, 0})});
  const WaveDecomposition d = decompose(lin, u);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.strengths[0].values, vec({0.1, -0.2}));
  EXPECT_EQ(d.strengths[1].values, vec({-0.1, 0.2}));
  EXPECT_NEAR(linear_functional(make_decomposition(2, {0.0}, {StrengthVector(vec({0.1, -0.2}))})), 0.3, 1e-15);
}

TEST(Functionals, DecomposeReconstructsJumps) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(1);
  const PiecewiseConstantFn u = random_profile(rng, 2, 20, 0.05);
  const WaveDecomposition d = decompose(sys, u);
  for (std::size_t k = 0; k < u.jumps(); ++k)
    EXPECT_LE(norm_inf(compose_psi(sys, d.strengths[k], u.left(k)) - u.right(k)), 1e-8);
}

TEST(Functionals, ApproachingPairsExamples) {
  const std::vector<FieldKind> ld{FieldKind::LinearlyDegenerate, FieldKind::LinearlyDegenerate};
  const auto single = make_decomposition(2, {0.0}, {StrengthVector(vec({0.1, -0.2}))});
  EXPECT_TRUE(approaching_pairs(single, ld).empty());
  const auto two = make_decomposition(2, {0.0, 1.0}, {StrengthVector(vec({0.0, 0.1})), StrengthVector(vec({0.2, 0.0}))});
  const auto pairs = approaching_pairs(two, ld);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].first, (WaveRef{0, 1}));
  EXPECT_EQ(pairs[0].second, (WaveRef{1, 0}));
  EXPECT_NEAR(interaction_potential(two, ld), 0.02, 1e-16);

  const std::vector<FieldKind> gnl{FieldKind::GenuinelyNonlinear};
  const auto rare = make_decomposition(1, {0.0, 1.0}, {StrengthVector(vec({0.1})), StrengthVector(vec({0.2}))});
  EXPECT_TRUE(approaching_pairs(rare, gnl).empty());
  const auto shocks = make_decomposition(1, {0.0, 1.0}, {StrengthVector(vec({-0.1})), StrengthVector(vec({-0.2}))});
  EXPECT_NEAR(interaction_potential(shocks, gnl), 0.02, 1e-16);
}

TEST(Functionals, InteractionPotentialMatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (const auto& name : preset_names()) {
    const HyperbolicSystem sys = preset(name);
    for (int t = 0; t < 5; ++t) {
      const PiecewiseConstantFn u = random_profile(rng, sys.dim(), 15, 0.05);
      const WaveDecomposition d = decompose(sys, u);
      const double fast = interaction_potential(d, sys.field_kinds());
      EXPECT_NEAR(fast, brute_force_interaction(d, sys.field_kinds()), 1e-15 * (1.0 + fast)) << name;
      double via_pairs = 0.0;
      for (const auto& [a, b] : approaching_pairs(d, sys.field_kinds()))
        via_pairs += std::abs(d.strengths[a.site][a.family] * d.strengths[b.site][b.family]);
      EXPECT_NEAR(fast, via_pairs, 1e-15 * (1.0 + fast)) << name;
    }
  }
}

TEST(Functionals, Upsilon) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const FunctionalConstants k;
  EXPECT_EQ(upsilon(decompose(sys, PiecewiseConstantFn(2)), sys.field_kinds(), k), 0.0);
  const PiecewiseConstantFn one = PiecewiseConstantFn::from_steps(2, {{0.0, vec({0.02, 0.01})}, {1.0, vec({0, 0})}});
  const WaveDecomposition d1 = decompose(sys, one);
  std::mt19937_64 rng(3);
  const PiecewiseConstantFn u = random_profile(rng, 2, 10, 0.05);
  const WaveDecomposition d = decompose(sys, u);
  EXPECT_NEAR(upsilon(d, sys.field_kinds(), k),
              linear_functional(d) + k.C0 * brute_force_interaction(d, sys.field_kinds()), 1e-14);
  const FunctionalReport r = functional_report(sys, u, k, 0.5);
  EXPECT_NEAR(r.upsilon, r.V + k.C0 * r.interaction, 1e-12);
  EXPECT_EQ(r.t, 0.5);
  // a single jump carries no approaching pair with itself
  const WaveDecomposition single = make_decomposition(2, {0.0}, {d1.strengths[0]});
  EXPECT_EQ(upsilon(single, sys.field_kinds(), k), linear_functional(single));
}

TEST(Functionals, WeightsMatchDirectSums) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const FunctionalConstants k;
  const auto empty = make_decomposition(2, {}, {});
  EXPECT_EQ(liu_yang_weight(empty, empty, sys.field_kinds(), k, 0, 0.1, 0.0, 0.0, 0.0), 1.0);
  std::mt19937_64 rng(4);
  const PiecewiseConstantFn v = random_profile(rng, 2, 12, 0.05);
  const PiecewiseConstantFn w = random_profile(rng, 2, 9, 0.05);
  const WaveDecomposition dv = decompose(sys, v), dw = decompose(sys, w);
  const double qv = interaction_potential(dv, sys.field_kinds()), qw = interaction_potential(dw, sys.field_kinds());
  std::uniform_real_distribution<double> xs(-1.2, 1.2), qs(-0.1, 0.1);
  for (int t = 0; t < 200; ++t) {
    const double x = t < 12 ? dv.positions[t] : xs(rng);  // include breakpoints themselves
    const double q = qs(rng);
    for (int i = 0; i < 2; ++i) {
      const double direct = 1.0 + k.kappa1 * brute_force_bold_a(dv, sys.field_kinds(), i, q, x) +
                            k.kappa1 * brute_force_bold_a(dw, sys.field_kinds(), i, -q, x) +
                            k.kappa1 * k.kappa2 * (qv + qw);
      EXPECT_NEAR(liu_yang_weight(dv, dw, sys.field_kinds(), k, i, q, x, qv, qw), direct, 1e-13);
    }
  }
}

TEST(Functionals, StabilityFunctionalExamples) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const FunctionalConstants k;
  std::mt19937_64 rng(5);
  const PiecewiseConstantFn v = random_profile(rng, 2, 8, 0.05);
  EXPECT_EQ(stability_functional(sys, v, v, k), 0.0);

  const HyperbolicSystem scalar = preset(Preset::ScalarConvex);
  for (double h : {0.02, -0.03}) {
    const PiecewiseConstantFn zero(1);
    const PiecewiseConstantFn bump({0.0, 1.0}, {vec({0}), vec({h}), vec({0})});
    // one wave of bump faces the integration point from the side selected by the sign of -q,
    // and the two waves of bump form one approaching pair
    const double hand = std::abs(h) * (1.0 + k.kappa1 * std::abs(h) + k.kappa1 * k.kappa2 * h * h);
    EXPECT_NEAR(stability_functional(scalar, zero, bump, k), hand, 1e-14);
  }
}

TEST(Functionals, StabilityFunctionalComparableToL1) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const FunctionalConstants k;
  std::mt19937_64 rng(6);
  double lo = 1e9, hi = 0.0;
  for (int t = 0; t < 30; ++t) {
    const PiecewiseConstantFn v = random_profile(rng, 2, 6, 0.02);
    const PiecewiseConstantFn w = random_profile(rng, 2, 6, 0.02);
    const double ratio = stability_functional(sys, v, w, k) / l1_distance(v, w);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  EXPECT_GT(lo, 0.1);
  EXPECT_LT(hi, 10.0);
}

TEST(Functionals, StabilityFunctionalIsLowerSemicontinuous) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  std::mt19937_64 rng(77);
  const PiecewiseConstantFn u = random_profile(rng, 2, 5, 0.02);
  const PiecewiseConstantFn w = random_profile(rng, 2, 5, 0.02);
  auto shifted = [](const PiecewiseConstantFn& f, double h) {
    std::vector<double> x = f.breakpoints();
    for (double& b : x) b += h;
    return PiecewiseConstantFn(x, f.values());
  };
  const FunctionalConstants c;
  const double phi = stability_functional(sys, u, w, c);
  std::vector<double> gaps;
  for (int k = 4; k <= 16; k += 2) {
    const double h = std::ldexp(1.0, -k);
    const PiecewiseConstantFn v = shifted(u, h), vt = shifted(w, -h);
    ASSERT_LE(l1_distance(v, u) + l1_distance(vt, w), 20.0 * h * (total_variation(u) + total_variation(w)));
    gaps.push_back(stability_functional(sys, v, vt, c) - phi);
  }
  // approximations converging in L1: Phi converges to Phi(u, w), so the liminf is attained
  for (std::size_t k = 1; k < gaps.size(); ++k) EXPECT_LE(std::abs(gaps[k]), std::abs(gaps[k - 1]) + 1e-12);
  EXPECT_LE(std::abs(gaps.back()), 1e-3 * phi);
}
