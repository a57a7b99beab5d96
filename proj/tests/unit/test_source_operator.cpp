#include "balaw/errors.hpp"
#include "balaw/source_operator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace balaw;

namespace {

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

State direct_convolution(const ConvolutionKernel& q, const PiecewiseConstantFn& u, double x) {
  State out = State::Zero(u.dim());
  const auto& e = q.edges();
  const auto& xb = u.breakpoints();
  for (std::size_t a = 0; a + 1 < e.size(); ++a)
    for (std::size_t b = 1; b < xb.size(); ++b) {
      const double lo = std::max(e[a], x - xb[b]);
      const double hi = std::min(e[a + 1], x - xb[b - 1]);
      if (hi > lo) out += (hi - lo) * q.values()[a].cwiseProduct(u.values()[b]);
    }
  return out;
}

// Cell average of Q * u: trapezoid rule between consecutive kinks is exact for a
// piecewise-linear integrand.
State cell_average(const ConvolutionKernel& q, const PiecewiseConstantFn& u, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (double e : q.edges())
    for (double x : u.breakpoints())
      if (e + x > lo && e + x < hi) pts.push_back(e + x);
  std::sort(pts.begin(), pts.end());
  State acc = State::Zero(u.dim());
  for (std::size_t k = 1; k < pts.size(); ++k)
    acc += 0.5 * (pts[k] - pts[k - 1]) * (direct_convolution(q, u, pts[k - 1]) + direct_convolution(q, u, pts[k]));
  return acc / (hi - lo);
}

}  // namespace

TEST(SourceOperator, LinearDampingMargin) {
  for (const auto& name : preset_names()) {
    const HyperbolicSystem sys = preset(name);
    EXPECT_NEAR(dissipativity_margin(sys, LocalSource::linear_damping(sys.dim(), 0.7)), 0.7, 1e-12) << name;
    EXPECT_EQ(dissipativity_margin(sys, LocalSource::zero(sys.dim())), 0.0) << name;
  }
}

TEST(SourceOperator, ShearDampingMarginMatchesColumnSums) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const double beta = 1.0, eps = 0.3;
  const double c0 = std::sqrt(-psystem_pressure_derivative(1.0));
  Matrix r(2, 2);
  r << 1.0, -1.0, c0, c0;
  r /= std::sqrt(1.0 + c0 * c0);
  Matrix dg(2, 2);
  dg << -beta, eps, 0.0, -beta;
  const Matrix m = r.inverse() * dg * r;
  const double oracle = std::min(-m(0, 0) - std::abs(m(1, 0)), -m(1, 1) - std::abs(m(0, 1)));
  const LocalSource g = LocalSource::shear_damping(2, beta, eps);
  EXPECT_NEAR(dissipativity_margin(sys, g), oracle, 1e-12);
  EXPECT_LE((source_matrix(sys, g) - m).norm(), 1e-12);
  EXPECT_THROW(LocalSource::shear_damping(1, beta, eps), ConfigError);
}

TEST(SourceOperator, SpecValidation) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const SourceSpec spec(sys, LocalSource::linear_damping(2, 1.0), ConvolutionKernel::box(2, 0.05, 0.5));
  EXPECT_NEAR(spec.c_certified(), 1.0, 1e-12);
  EXPECT_TRUE(spec.kernel_within_cap());
  EXPECT_FALSE(spec.with_kernel(ConvolutionKernel::box(2, 0.2, 0.5)).kernel_within_cap());
  LocalSource shifted{"Shifted", 2, [](const State& u) -> State { return u + State::Ones(2); }, {}};
  EXPECT_THROW(SourceSpec(sys, shifted, ConvolutionKernel::zero(2)), ConfigError);
  EXPECT_THROW(SourceSpec(sys, LocalSource::linear_damping(1, 1.0), ConvolutionKernel::zero(2)), DimensionMismatch);
}

TEST(SourceOperator, ApplySourceExamples) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const SourceSpec spec(sys, LocalSource::linear_damping(2, 0.8), ConvolutionKernel::box(2, 0.04, 0.3));
  EXPECT_TRUE(apply_source(spec, PiecewiseConstantFn(2), 16).is_zero());
  std::mt19937_64 rng(1);
  const PiecewiseConstantFn u = random_profile(rng, 2, 8, 0.05);
  const PiecewiseConstantFn local = apply_source(spec.with_kernel(ConvolutionKernel::zero(2)), u, 16);
  EXPECT_EQ(local, -0.8 * u);
}

TEST(SourceOperator, ApplySourceMatchesPointwiseOracle) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const SourceSpec spec(sys, LocalSource::shear_damping(2, 1.0, 0.2), ConvolutionKernel::exponential(2, 0.05, 0.2, 2.0));
  std::mt19937_64 rng(2);
  const int N = 16;
  const PiecewiseConstantFn u = random_profile(rng, 2, 10, 0.05);
  const PiecewiseConstantFn out = apply_source(spec, u, N);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = xs(rng);
    const double cell = std::ceil(x * N) - 1;  // x in ]cell/N, (cell+1)/N]
    const State oracle = spec.local()(u(x)) + cell_average(spec.kernel(), u, cell / N, (cell + 1) / N);
    EXPECT_LE(norm_inf(out(x) - oracle), 1e-10);
  }
}

TEST(SourceOperator, EulerStepExamples) {
  const HyperbolicSystem sys = preset(Preset::PSystem);
  const SourceSpec spec(sys, LocalSource::linear_damping(2, 1.0), ConvolutionKernel::zero(2));
  std::mt19937_64 rng(3);
  const PiecewiseConstantFn u = random_profile(rng, 2, 6, 0.05);
  EXPECT_EQ(euler_source_step(spec, 0.0, u, 16), u);
  const PiecewiseConstantFn v = euler_source_step(spec, 0.01, u, kExactConvolution);
  for (double x = -1.2; x < 1.2; x += 0.01) EXPECT_LE(norm_inf(v(x) - 0.99 * u(x)), 1e-15);
  EXPECT_THROW(euler_source_step(spec, 0.02, u, 16), InvalidArgument);

  const SourceSpec growth(sys, LocalSource::linear_damping(2, -30.0), ConvolutionKernel::zero(2));
  const PiecewiseConstantFn big = PiecewiseConstantFn({0.0, 1.0}, {State::Zero(2), State::Constant(2, 0.2), State::Zero(2)});
  EXPECT_THROW(euler_source_step(growth, 0.01, big, 16), LeftDomain);
}

TEST(SourceOperator, SampledConvolutionPreservesMassAndVariation) {
  std::mt19937_64 rng(4);
  const ConvolutionKernel q = ConvolutionKernel::box(2, 0.05, 0.25);
  for (int t = 0; t < 5; ++t) {
    const PiecewiseConstantFn u = random_profile(rng, 2, 10, 0.05);
    const PiecewiseConstantFn s = sampled_convolution(q, u);
    const PiecewiseLinearFn f = convolve(q, u);
    const State mass = f.integral(-10, 10);
    State sampled_mass = State::Zero(2);
    for (std::size_t k = 1; k < s.breakpoints().size(); ++k)
      sampled_mass += (s.breakpoints()[k] - s.breakpoints()[k - 1]) * s.values()[k];
    EXPECT_LE(norm_inf(mass - sampled_mass), 1e-15);
    EXPECT_LE(total_variation(s), q.l1_norm() * total_variation(u) + 1e-12);
  }
}
