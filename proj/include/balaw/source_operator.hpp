#pragma once

#include "balaw/hyperbolic_system.hpp"
#include "balaw/piecewise_fn.hpp"

#include <functional>
#include <string>

namespace balaw {

/// Local part g of the source, with g(0) = 0.
struct LocalSource {
  std::string name;
  int n = 0;
  std::function<State(const State&)> g;
  /// Optional; central differences otherwise.
  std::function<Matrix(const State&)> jacobian;

  State operator()(const State& u) const { return g(u); }
  Matrix dg(const State& u) const;

  static LocalSource zero(int n);
  /// g(u) = -beta u
  static LocalSource linear_damping(int n, double beta);
  /// g(u) = -beta u + eps (u_2, 0); two-component systems only.
  static LocalSource shear_damping(int n, double beta, double eps);
};

/// Column diagonal dominance margin: min_i (-M_ii - sum_{j != i} |M_ji|) with
/// M = R^-1 Dg(0) R. Positive iff the source is dissipative.
double dissipativity_margin(const HyperbolicSystem& system, const LocalSource& g);
Matrix source_matrix(const HyperbolicSystem& system, const LocalSource& g);

/// Passing this as the grid size selects the exact (unprojected) convolution.
inline constexpr int kExactConvolution = 0;

/// G(u) = g(u) + Q * u together with its certificate.
class SourceSpec {
 public:
  SourceSpec(HyperbolicSystem system, LocalSource g, ConvolutionKernel kernel, double s_max = 0.01);

  const HyperbolicSystem& system() const { return system_; }
  const LocalSource& local() const { return g_; }
  const ConvolutionKernel& kernel() const { return kernel_; }
  /// M = R^-1 Dg(0) R
  const Matrix& M() const { return m_; }
  double c_certified() const { return c_; }
  double s_max() const { return s_max_; }
  /// Whether ||Q||_L1 <= ratio * c.
  bool kernel_within_cap(double ratio = 0.05) const { return kernel_.l1_norm() <= ratio * c_; }

  SourceSpec with_kernel(ConvolutionKernel kernel) const;
  SourceSpec with_local(LocalSource g) const;

 private:
  HyperbolicSystem system_;
  LocalSource g_;
  ConvolutionKernel kernel_;
  Matrix m_;
  double c_ = 0.0;
  double s_max_ = 0.01;
};

/// g(u) + Pi_N(Q * u) on the union of the breakpoints of u and the projection grid.
PiecewiseConstantFn apply_source(const SourceSpec& spec, const PiecewiseConstantFn& u, int n_cells);

/// Piecewise-constant sampling of Q * u: cell averages on the union of the breakpoints
/// of u and the convolution nodes, each interval cut into extra_cells pieces.
PiecewiseConstantFn sampled_convolution(const ConvolutionKernel& q, const PiecewiseConstantFn& u, int extra_cells = 4);

/// u + s (g(u) + Pi_N(Q * u)); n_cells = kExactConvolution uses sampled_convolution.
/// Throws LeftDomain if a value leaves the domain.
PiecewiseConstantFn euler_source_step(const SourceSpec& spec, double s, const PiecewiseConstantFn& u, int n_cells,
                                      int extra_cells = 4);

}  // namespace balaw
