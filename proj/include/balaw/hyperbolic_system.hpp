#pragma once

#include "balaw/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace balaw {

enum class FieldKind { GenuinelyNonlinear, LinearlyDegenerate };

/// Eigenstructure of the flux Jacobian at one state.
///
/// `right` holds unit right eigenvectors as columns, `left` the dual basis as rows
/// (left * right == I). Speeds are sorted increasingly.
struct EigenFrame {
  State lambdas;
  Matrix right;
  Matrix left;

  int dim() const { return static_cast<int>(lambdas.size()); }
  State r(int j) const { return right.col(j); }
  State l(int j) const { return left.row(j).transpose(); }
};

/// Everything needed to build a system. Only `n`, `flux`, `kinds` and `omega_radius`
/// are mandatory; missing derivatives fall back to finite differences.
struct SystemDefinition {
  std::string name;
  int n = 1;
  std::function<State(const State&)> flux;
  std::function<Matrix(const State&)> jacobian;
  /// Second derivative of the flux in direction v: D^2 f(u)[v, v].
  std::function<State(const State&, const State&)> second_derivative;
  std::vector<FieldKind> kinds;
  double omega_radius = 0.1;
};

namespace detail {
struct SystemData;
}

/// Strictly hyperbolic n x n system u_t + f(u)_x = 0 on the max-norm box of radius
/// `omega_radius` around the origin.
///
/// Immutable value handle: copies share the same underlying data.
class HyperbolicSystem {
 public:
  /// Absolute tolerance on eigenvalue separation.
  static constexpr double kGapTol = 1e-6;

  explicit HyperbolicSystem(SystemDefinition def);

  const std::string& name() const;
  int dim() const;
  double omega_radius() const;
  FieldKind field_kind(int j) const;
  const std::vector<FieldKind>& field_kinds() const;
  bool genuinely_nonlinear(int j) const { return field_kind(j) == FieldKind::GenuinelyNonlinear; }

  bool in_domain(const State& u) const;
  State flux(const State& u) const;
  Matrix jacobian(const State& u) const;
  State second_derivative(const State& u, const State& v) const;

  /// Sorted, bi-orthonormal frame at u with signs aligned to the base frame.
  /// Throws NotInDomain or NotStrictlyHyperbolic.
  EigenFrame eigen_decompose(const State& u) const;

  /// Frame of an arbitrary matrix (e.g. an averaged Jacobian), aligned to the base frame.
  EigenFrame decompose_matrix(const Matrix& a) const;

  /// grad(lambda_j) . r_j at u, evaluated as l_j . D^2 f(u)[r_j, r_j].
  double nonlinearity(const State& u, int j, const EigenFrame& frame) const;
  double nonlinearity(const State& u, int j) const;

  /// Frame at the origin; R() has the unit right eigenvectors r_j(0) as columns.
  const EigenFrame& base_frame() const;
  const Matrix& R() const;
  const Matrix& R_inv() const;

  /// k_j: the constant rate of change of lambda_j along the j-th curves. For GNL
  /// fields k_j = grad(lambda_j)(0) . r_j(0) > 0, for LD fields 1 (arc length).
  double curve_rate(int j) const;

  /// Smallest lambda_1 and largest lambda_n over a sample grid of the domain.
  double min_speed() const;
  double max_speed() const;

 private:
  std::shared_ptr<const detail::SystemData> data_;
};

/// Free-function form of HyperbolicSystem::eigen_decompose.
EigenFrame eigen_decompose(const HyperbolicSystem& system, const State& u);

enum class Preset { LinearDiagonal, ScalarConvex, PSystem };

/// Catalog systems.
///  - LinearDiagonal: f(u) = diag(-1, 1) u, both fields linearly degenerate.
///  - ScalarConvex:   f(u) = u^2/2 + u, lambda = u + 1.
///  - PSystem:        isentropic gas in Lagrangian coordinates around (tau, w) = (1, 0),
///                    state (tau - 1, w), f = (-w, p(1 + u_1)), p(tau) = tau^-1.4.
HyperbolicSystem preset(Preset name);
HyperbolicSystem preset(std::string_view name);
std::string preset_name(Preset name);
std::vector<std::string> preset_names();

/// Adiabatic exponent and pressure law of the PSystem preset.
inline constexpr double kPSystemGamma = 1.4;
double psystem_pressure(double tau);
double psystem_pressure_derivative(double tau);

}  // namespace balaw
