#pragma once

#include "balaw/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace balaw {

/// Values closer than this in every component are merged into one interval.
inline constexpr double kJumpThreshold = 1e-13;

/// Compactly supported piecewise-constant function R -> R^n.
///
/// values[k] is taken on ]x_{k-1}, x_k] (with x_{-1} = -inf, x_m = +inf), so the
/// function is left-continuous like the cells of the projection grid. The first and
/// last values are always zero.
class PiecewiseConstantFn {
 public:
  explicit PiecewiseConstantFn(int n = 1);
  /// values.size() must be breakpoints.size() + 1; outer values must vanish.
  PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<State> values);

  /// Builds u from (x_k, v_k) pairs: u = v_k on ]x_k, x_{k+1}], u = 0 left of x_0 and
  /// right of the last point (whose value must therefore be zero, or is appended).
  static PiecewiseConstantFn from_steps(int n, const std::vector<std::pair<double, State>>& steps);

  int dim() const { return n_; }
  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<State>& values() const { return v_; }
  std::size_t jumps() const { return x_.size(); }
  bool is_zero() const { return x_.empty(); }

  State operator()(double x) const;
  /// Left and right traces at breakpoint k.
  const State& left(std::size_t k) const { return v_[k]; }
  const State& right(std::size_t k) const { return v_[k + 1]; }

  double support_min() const { return x_.empty() ? 0.0 : x_.front(); }
  double support_max() const { return x_.empty() ? 0.0 : x_.back(); }
  double sup_norm() const;

  /// Pointwise image under a map with F(0) = 0 required to keep compact support.
  PiecewiseConstantFn map(const std::function<State(const State&)>& fn) const;

  bool operator==(const PiecewiseConstantFn& other) const = default;

 private:
  void normalize();

  int n_;
  std::vector<double> x_;
  std::vector<State> v_;
};

/// Applies fn(u(x), v(x)) on the merged partition; fn(0, 0) must be 0.
PiecewiseConstantFn combine(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v,
                            const std::function<State(const State&, const State&)>& fn);
PiecewiseConstantFn operator+(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v);
PiecewiseConstantFn operator-(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v);
PiecewiseConstantFn operator*(double a, const PiecewiseConstantFn& u);

/// Sum over jumps of the l1 norm of the jump.
double total_variation(const PiecewiseConstantFn& u);
double l1_norm(const PiecewiseConstantFn& u);
double l1_distance(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v);

/// Merged, sorted breakpoints of u and v.
std::vector<double> merged_breakpoints(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v);

/// Continuous piecewise-linear function, zero outside [nodes.front(), nodes.back()].
class PiecewiseLinearFn {
 public:
  explicit PiecewiseLinearFn(int n = 1) : n_(n) {}
  PiecewiseLinearFn(int n, std::vector<double> nodes, std::vector<State> values);

  int dim() const { return n_; }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<State>& values() const { return v_; }

  State operator()(double x) const;
  /// Integral over ]a, b].
  State integral(double a, double b) const;
  double l1_norm() const;
  double total_variation() const;

 private:
  int n_;
  std::vector<double> x_;
  std::vector<State> v_;
  std::vector<State> cumulative_;  // integral from -inf to each node
};

/// Piecewise-constant, compactly supported kernel acting componentwise:
/// (Q * u)_i(x) = int Q_i(y) u_i(x - y) dy.
class ConvolutionKernel {
 public:
  explicit ConvolutionKernel(int n = 1) : n_(n) {}
  /// values[k] on ]edges[k], edges[k+1]]; edges.size() == values.size() + 1.
  ConvolutionKernel(std::vector<double> edges, std::vector<State> values);

  static ConvolutionKernel zero(int n) { return ConvolutionKernel(n); }
  /// Q_i = alpha / (2 w n) on [-w, w], so that ||Q||_L1 = alpha.
  static ConvolutionKernel box(int n, double alpha, double w);
  /// Q_i ~ e^{-|x|} / 2 sampled at cell midpoints on [-cutoff, cutoff], rescaled to ||Q||_L1 = alpha.
  static ConvolutionKernel exponential(int n, double alpha, double mesh, double cutoff = 10.0);
  /// Midpoint discretization of a profile q(x) (same for each component) on [a, b],
  /// rescaled to ||Q||_L1 = alpha.
  static ConvolutionKernel discretize(int n, const std::function<double(double)>& q, double a, double b,
                                      double mesh, double alpha);

  int dim() const { return n_; }
  bool is_zero() const { return values_.empty(); }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<State>& values() const { return values_; }
  /// int sum_i |Q_i(y)| dy
  double l1_norm() const { return l1_; }
  ConvolutionKernel scaled(double a) const;
  ConvolutionKernel operator+(const ConvolutionKernel& other) const;

 private:
  int n_;
  std::vector<double> edges_;
  std::vector<State> values_;
  double l1_ = 0.0;
};

/// Exact Q * u.
PiecewiseLinearFn convolve(const ConvolutionKernel& q, const PiecewiseConstantFn& u);

/// Grid cell index range of Pi_N: cells ]k/N, (k+1)/N] with k in [-1 - N^2, -1 + N^2].
std::pair<long, long> projection_window(int n_cells);

/// Pi_N u: exact cell averages on the window, zero outside.
PiecewiseConstantFn project(const PiecewiseConstantFn& u, int n_cells);
PiecewiseConstantFn project(const PiecewiseLinearFn& u, int n_cells);

/// Pi_N (Q * u).
PiecewiseConstantFn convolve_projected(const ConvolutionKernel& q, const PiecewiseConstantFn& u, int n_cells);

/// Averages of a piecewise-linear function over each interval of a partition of
/// [cuts.front(), cuts.back()]; returns cuts.size() - 1 values.
std::vector<State> interval_averages(const PiecewiseLinearFn& f, const std::vector<double>& cuts);

}  // namespace balaw
