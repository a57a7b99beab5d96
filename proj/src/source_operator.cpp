#include "balaw/source_operator.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace balaw {

Matrix LocalSource::dg(const State& u) const {
  if (jacobian) return jacobian(u);
  const int m = static_cast<int>(u.size());
  Matrix j(m, m);
  const double h = 1e-6 * (1.0 + norm_inf(u));
  for (int k = 0; k < m; ++k) {
    State up = u, um = u;
    up[k] += h;
    um[k] -= h;
    j.col(k) = (g(up) - g(um)) / (2.0 * h);
  }
  return j;
}

LocalSource LocalSource::zero(int n) {
  return {"Zero", n, [n](const State&) -> State { return State::Zero(n); },
          [n](const State&) -> Matrix { return Matrix::Zero(n, n); }};
}

LocalSource LocalSource::linear_damping(int n, double beta) {
  return {"LinearDamping", n, [beta](const State& u) -> State { return -beta * u; },
          [n, beta](const State&) -> Matrix { return -beta * Matrix::Identity(n, n); }};
}

LocalSource LocalSource::shear_damping(int n, double beta, double eps) {
  if (n != 2) throw ConfigError("ShearDamping needs a two-component system");
  return {"ShearDamping", n,
          [beta, eps](const State& u) -> State {
            State out = -beta * u;
            out[0] += eps * u[1];
            return out;
          },
          [beta, eps](const State&) -> Matrix {
            Matrix j = -beta * Matrix::Identity(2, 2);
            j(0, 1) += eps;
            return j;
          }};
}

Matrix source_matrix(const HyperbolicSystem& system, const LocalSource& g) {
  if (g.n != system.dim()) throw DimensionMismatch("source and system dimensions differ");
  return system.R_inv() * g.dg(State::Zero(g.n)) * system.R();
}

double dissipativity_margin(const HyperbolicSystem& system, const LocalSource& g) {
  const Matrix m = source_matrix(system, g);
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.cols(); ++i) {
    double off = 0.0;
    for (int j = 0; j < m.rows(); ++j)
      if (j != i) off += std::abs(m(j, i));
    c = std::min(c, -m(i, i) - off);
  }
  return c;
}

SourceSpec::SourceSpec(HyperbolicSystem system, LocalSource g, ConvolutionKernel kernel, double s_max)
    : system_(std::move(system)), g_(std::move(g)), kernel_(std::move(kernel)), s_max_(s_max) {
  if (g_.n != system_.dim()) throw DimensionMismatch("source and system dimensions differ");
  if (!kernel_.is_zero() && kernel_.dim() != system_.dim()) throw DimensionMismatch("kernel and system dimensions differ");
  if (norm_inf(g_(State::Zero(g_.n))) > 1e-12) throw ConfigError("local source must vanish at the origin");
  if (!(s_max_ > 0.0)) throw ConfigError("s_max must be positive");
  m_ = source_matrix(system_, g_);
  c_ = dissipativity_margin(system_, g_);
}

SourceSpec SourceSpec::with_kernel(ConvolutionKernel kernel) const {
  return SourceSpec(system_, g_, std::move(kernel), s_max_);
}

SourceSpec SourceSpec::with_local(LocalSource g) const { return SourceSpec(system_, std::move(g), kernel_, s_max_); }

PiecewiseConstantFn apply_source(const SourceSpec& spec, const PiecewiseConstantFn& u, int n_cells) {
  const LocalSource& g = spec.local();
  if (n_cells == kExactConvolution) {
    return combine(u, sampled_convolution(spec.kernel(), u),
                   [&](const State& a, const State& b) -> State { return g(a) + b; });
  }
  return combine(u, convolve_projected(spec.kernel(), u, n_cells),
                 [&](const State& a, const State& b) -> State { return g(a) + b; });
}

PiecewiseConstantFn sampled_convolution(const ConvolutionKernel& q, const PiecewiseConstantFn& u, int extra_cells) {
  if (extra_cells < 1) throw InvalidArgument("extra_cells must be positive");
  const PiecewiseLinearFn f = convolve(q, u);
  if (f.nodes().empty()) return PiecewiseConstantFn(u.dim());
  std::vector<double> base;
  std::set_union(u.breakpoints().begin(), u.breakpoints().end(), f.nodes().begin(), f.nodes().end(),
                 std::back_inserter(base));
  base.erase(std::unique(base.begin(), base.end()), base.end());
  std::vector<double> cuts;
  cuts.reserve((base.size() - 1) * extra_cells + 1);
  for (std::size_t k = 0; k + 1 < base.size(); ++k)
    for (int j = 0; j < extra_cells; ++j) cuts.push_back(base[k] + (base[k + 1] - base[k]) * j / extra_cells);
  cuts.push_back(base.back());
  // subdivisions of very short intervals can round onto each other
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<State> avg = interval_averages(f, cuts);
  std::vector<State> vals;
  vals.reserve(avg.size() + 2);
  vals.push_back(State::Zero(u.dim()));
  for (State& s : avg) vals.push_back(std::move(s));
  vals.push_back(State::Zero(u.dim()));
  return PiecewiseConstantFn(std::move(cuts), std::move(vals));
}

PiecewiseConstantFn euler_source_step(const SourceSpec& spec, double s, const PiecewiseConstantFn& u, int n_cells,
                                      int extra_cells) {
  if (s < 0.0) throw InvalidArgument("source step needs s >= 0");
  if (s > spec.s_max() * (1.0 + 1e-12)) throw InvalidArgument("source step exceeds s_max");
  if (s == 0.0) return u;
  const LocalSource& g = spec.local();
  const PiecewiseConstantFn conv = n_cells == kExactConvolution ? sampled_convolution(spec.kernel(), u, extra_cells)
                                                                : convolve_projected(spec.kernel(), u, n_cells);
  const HyperbolicSystem& sys = spec.system();
  return combine(u, conv, [&](const State& a, const State& b) -> State {
    State out = a + s * (g(a) + b);
    if (!sys.in_domain(out)) throw LeftDomain("source step left the domain");
    return out;
  });
}

}  // namespace balaw
