#pragma once

#include "balaw/hyperbolic_system.hpp"
#include "balaw/piecewise_fn.hpp"
#include "balaw/wave_curves.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace balaw {

/// Wave strengths sigma_{x, .} = E(u(x-), u(x+)) at every breakpoint of a profile.
struct WaveDecomposition {
  int n = 0;
  std::vector<double> positions;
  std::vector<StrengthVector> strengths;
  /// prefix[j][k] = sum_{m < k} |sigma_{m, j}|
  std::vector<std::vector<double>> prefix;

  std::size_t size() const { return positions.size(); }
  /// A_j^-(x) = sum_{y <= x} |sigma_{y, j}|
  double a_minus(int j, double x) const;
  /// A_j^+(x) = sum_{y > x} |sigma_{y, j}|
  double a_plus(int j, double x) const;
  double total(int j) const { return prefix[j].back(); }
};

struct FunctionalConstants {
  double C0 = 4.0;
  double kappa1 = 10.0;
  double kappa2 = 10.0;
  double delta = 0.1;
};

struct FunctionalReport {
  double t = 0.0;
  double V = 0.0;
  double interaction = 0.0;
  double upsilon = 0.0;
  std::optional<double> phi;
};

WaveDecomposition decompose(const HyperbolicSystem& system, const PiecewiseConstantFn& u,
                            const CurveOptions& opts = {});
/// Decomposition assembled from already known strengths.
WaveDecomposition make_decomposition(int n, std::vector<double> positions, std::vector<StrengthVector> strengths);

/// V = sum_x sum_i |sigma_{x, i}|
double linear_functional(const WaveDecomposition& dec);

struct WaveRef {
  std::size_t site;
  int family;
  bool operator==(const WaveRef&) const = default;
};

/// Pairs ((x, i), (y, j)) with x < y and either i > j, or i = j genuinely nonlinear with
/// min(sigma_{x,i}, sigma_{y,j}) < 0. Waves of zero strength are absent.
std::vector<std::pair<WaveRef, WaveRef>> approaching_pairs(const WaveDecomposition& dec,
                                                           const std::vector<FieldKind>& kinds);

/// Sum of |sigma_{x,i} sigma_{y,j}| over approaching pairs, in O(m n^2).
double interaction_potential(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds);

/// V + C0 * interaction
double upsilon(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds, const FunctionalConstants& consts);

/// Bold A_i[v](q, x).
double weight_sum(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds, int i, double q, double x);

/// W_i[v, vt](q, x). The interaction potentials of v and vt are passed in since they do
/// not depend on (i, q, x).
double liu_yang_weight(const WaveDecomposition& dec_v, const WaveDecomposition& dec_vt,
                       const std::vector<FieldKind>& kinds, const FunctionalConstants& consts, int i, double q,
                       double x, double interaction_v, double interaction_vt);

/// Phi(v, vt) = sum_i int |q_i(x)| W_i(q_i(x), x) dx, summed exactly over the merged partition
/// with W_i evaluated at interval midpoints.
double stability_functional(const HyperbolicSystem& system, const PiecewiseConstantFn& v,
                            const PiecewiseConstantFn& vt, const FunctionalConstants& consts,
                            const CurveOptions& opts = {});

FunctionalReport functional_report(const HyperbolicSystem& system, const PiecewiseConstantFn& u,
                                   const FunctionalConstants& consts, double t = 0.0);

}  // namespace balaw
