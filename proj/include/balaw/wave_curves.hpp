#pragma once

#include "balaw/hyperbolic_system.hpp"
#include "balaw/types.hpp"

#include <vector>

namespace balaw {

/// Numerical knobs of the curve integrators and the Riemann inversions.
struct CurveOptions {
  /// Upper bound on the number of RK4 steps along a curve segment.
  int max_rk_steps = 64;
  /// Largest RK4 step in the curve parameter; short curves use fewer steps.
  double max_rk_step = 5e-3;
  /// Tolerance on the state residual of the Newton inversions.
  double newton_tol = 1e-10;
  int max_iter = 50;
};

struct ShockPoint {
  State state;
  double speed = 0.0;
};

/// R_j(sigma)(u): integral curve of r_j, parametrized so that lambda_j changes at rate
/// k_j (GNL) or by arc length (LD). Throws LeftDomain.
State rarefaction_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u,
                        const CurveOptions& opts = {});

/// S_j(sigma)(u): point on the j-th Hugoniot locus through u with lambda_j(S) - lambda_j(u)
/// = k_j sigma, together with its Rankine-Hugoniot speed. LD fields reuse the integral
/// curve. Throws LeftDomain or NoConvergence.
ShockPoint shock_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u,
                       const CurveOptions& opts = {});

/// Lax curve psi_j: rarefaction branch for sigma >= 0, shock branch for sigma < 0.
State lax_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u,
                const CurveOptions& opts = {});

/// Psi(sigma)(u_minus) = psi_n(sigma_n) o ... o psi_1(sigma_1)(u_minus).
State compose_psi(const HyperbolicSystem& sys, const StrengthVector& sigma, const State& u_minus,
                  const CurveOptions& opts = {});

/// Intermediate states u_0 = u_minus, ..., u_n of Psi.
std::vector<State> psi_states(const HyperbolicSystem& sys, const StrengthVector& sigma, const State& u_minus,
                              const CurveOptions& opts = {});

/// The map E: strengths sigma with Psi(sigma)(u_minus) = u_plus.
StrengthVector solve_riemann(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus,
                             const CurveOptions& opts = {});

/// S(q)(u_minus) = S_n(q_n) o ... o S_1(q_1)(u_minus).
State compose_shocks(const HyperbolicSystem& sys, const StrengthVector& q, const State& u_minus,
                     const CurveOptions& opts = {});

/// Inverse of compose_shocks: q with S(q)(u_minus) = u_plus.
StrengthVector invert_shocks(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus,
                             const CurveOptions& opts = {});

/// Integral of the Jacobian along the segment [a, b] (Gauss-Legendre).
Matrix averaged_jacobian(const HyperbolicSystem& sys, const State& a, const State& b);

/// j-th eigenvalue of the averaged Jacobian of the jump (a, b). Equals the
/// Rankine-Hugoniot speed for states on the j-th Hugoniot locus.
double jump_speed(const HyperbolicSystem& sys, int j, const State& a, const State& b);

/// || f(b) - f(a) - s (b - a) ||_inf
double rh_residual(const HyperbolicSystem& sys, const State& a, const State& b, double s);

enum class WaveKind { Shock, Contact, Rarefaction };

struct Wave {
  int family = 0;
  double strength = 0.0;
  WaveKind kind = WaveKind::Contact;
  /// Shock/contact: both equal the jump speed. Rarefaction: characteristic speeds at
  /// the left and right edge of the fan.
  double speed_left = 0.0;
  double speed_right = 0.0;
  State left;
  State right;
  /// Rankine-Hugoniot residual for shocks and contacts, 0 for rarefactions.
  double rh_residual = 0.0;
};

/// Self-similar solution of one Riemann problem.
struct WaveFan {
  WaveFan(HyperbolicSystem sys, State u_minus, State u_plus, StrengthVector sigma, std::vector<Wave> waves,
          CurveOptions opts = {});

  HyperbolicSystem system;
  State u_minus;
  State u_plus;
  StrengthVector sigma;
  std::vector<Wave> waves;
  CurveOptions options;

  /// Value of the self-similar solution at xi = x / t.
  State evaluate(double xi) const;
};

/// Solves the Riemann problem (u_minus, u_plus). Families with zero strength are omitted.
WaveFan riemann_fan(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus,
                    const CurveOptions& opts = {});

}  // namespace balaw
