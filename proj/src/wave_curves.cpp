#include "balaw/wave_curves.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace balaw {

namespace {

// 6-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 6> kGaussNodes = {0.033765242898423987, 0.16939530676686776, 0.38069040695840156,
                                               0.61930959304159844, 0.83060469323313224, 0.96623475710157601};
constexpr std::array<double, 6> kGaussWeights = {0.085662246189585178, 0.18038078652406930,
                                                 0.23395696728634552,  0.23395696728634552,
                                                 0.18038078652406930,  0.085662246189585178};

void require_family(const HyperbolicSystem& sys, int j) {
  if (j < 0 || j >= sys.dim()) throw std::out_of_range("family index " + std::to_string(j) + " out of range");
}

void require_in_domain(const HyperbolicSystem& sys, const State& u, const char* what) {
  if (!sys.in_domain(u)) throw LeftDomain(std::string(what) + " left the domain");
}

// Tangent of the reparametrized integral curve.
State curve_tangent(const HyperbolicSystem& sys, int j, const State& u) {
  if (!sys.in_domain(u)) throw LeftDomain("rarefaction curve left the domain");
  const EigenFrame f = sys.eigen_decompose(u);
  State r = f.r(j);
  if (!sys.genuinely_nonlinear(j)) return r;
  const double nl = sys.nonlinearity(u, j, f);
  return r * (sys.curve_rate(j) / nl);
}

int rk_steps(double sigma, const CurveOptions& opts) {
  const double a = std::abs(sigma);
  const int steps = static_cast<int>(std::ceil(a / opts.max_rk_step));
  return std::clamp(steps, 1, std::max(1, opts.max_rk_steps));
}

struct HugoniotPoint {
  State state;
  double speed;
};

// Point of the j-th Hugoniot locus at signed distance eps from u, found as the fixed
// point w = u + eps * r_j(A(u, w)), A the averaged Jacobian.
HugoniotPoint hugoniot_point(const HyperbolicSystem& sys, int j, double eps, const State& u, const State& r0,
                             const State* guess = nullptr) {
  State w = guess ? *guess : State(u + eps * r0);
  require_in_domain(sys, w, "shock curve");
  double speed = 0.0;
  double last_change = INFINITY;
  const double floor = 4e-16 * (1.0 + norm_inf(u));
  for (int it = 0; it < 200; ++it) {
    const EigenFrame f = sys.decompose_matrix(averaged_jacobian(sys, u, w));
    State r = f.r(j);
    if (r.dot(r0) < 0.0) r = -r;
    speed = f.lambdas[j];
    State next = u + eps * r;
    require_in_domain(sys, next, "shock curve");
    const double change = norm_inf(next - w);
    w = std::move(next);
    // Stop at round-off level or once the iteration stagnates there.
    if (change <= floor || (change < 1e-14 && change >= last_change)) return {w, speed};
    last_change = change;
  }
  const EigenFrame f = sys.decompose_matrix(averaged_jacobian(sys, u, w));
  if (norm_inf(u + eps * f.r(j) - w) <= 1e-13) return {w, f.lambdas[j]};
  throw NoConvergence("Hugoniot locus continuation did not converge");
}

template <class Compose>
StrengthVector invert(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus, Compose&& compose,
                      const CurveOptions& opts, const char* what) {
  const int n = sys.dim();
  if (u_minus.size() != n || u_plus.size() != n) throw DimensionMismatch("state dimension mismatch");
  if (!sys.in_domain(u_minus) || !sys.in_domain(u_plus)) throw LeftDomain(std::string(what) + ": state outside the domain");
  if (u_minus == u_plus) return StrengthVector::zero(n);

  State sigma = sys.R_inv() * (u_plus - u_minus);
  auto residual = [&](const State& s) { return State(compose(s) - u_plus); };

  State res = residual(sigma);
  double res_norm = norm_inf(res);
  auto jacobian_at = [&](const State& s, const State& base) {
    Matrix jac(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-7 * (1.0 + std::abs(s[k]));
      State sp = s;
      sp[k] += h;
      jac.col(k) = (compose(sp) - u_plus - base) / h;
    }
    return jac;
  };
  Matrix jac = jacobian_at(sigma, res);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (res_norm <= opts.newton_tol) return StrengthVector(sigma);
    const State delta = small_inverse(jac) * res;
    double step = 1.0;
    State trial;
    State trial_res;
    double trial_norm = res_norm;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
      trial = sigma - step * delta;
      try {
        trial_res = residual(trial);
      } catch (const LeftDomain&) {
        continue;
      }
      trial_norm = norm_inf(trial_res);
      if (trial_norm < res_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stale Jacobian: refresh once before giving up.
      jac = jacobian_at(sigma, res);
      const State d2 = small_inverse(jac) * res;
      trial = sigma - d2;
      trial_res = residual(trial);
      trial_norm = norm_inf(trial_res);
      if (!(trial_norm < res_norm)) break;
    }
    const bool slow = trial_norm > 0.1 * res_norm;
    sigma = trial;
    res = trial_res;
    res_norm = trial_norm;
    if (slow && res_norm > opts.newton_tol) jac = jacobian_at(sigma, res);
  }
  if (res_norm <= opts.newton_tol) return StrengthVector(sigma);
  throw NoConvergence(std::string(what) + ": Newton iteration did not converge (residual " + std::to_string(res_norm) +
                      ")");
}

}  // namespace

Matrix averaged_jacobian(const HyperbolicSystem& sys, const State& a, const State& b) {
  if (a == b) return sys.jacobian(a);
  const State d = b - a;
  Matrix acc = Matrix::Zero(sys.dim(), sys.dim());
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) acc += kGaussWeights[k] * sys.jacobian(a + kGaussNodes[k] * d);
  return acc;
}

double jump_speed(const HyperbolicSystem& sys, int j, const State& a, const State& b) {
  return sys.decompose_matrix(averaged_jacobian(sys, a, b)).lambdas[j];
}

double rh_residual(const HyperbolicSystem& sys, const State& a, const State& b, double s) {
  return norm_inf(sys.flux(b) - sys.flux(a) - s * (b - a));
}

State rarefaction_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u, const CurveOptions& opts) {
  require_family(sys, j);
  require_in_domain(sys, u, "rarefaction curve start");
  if (sigma == 0.0) return u;
  const int steps = rk_steps(sigma, opts);
  const double h = sigma / steps;
  State x = u;
  for (int s = 0; s < steps; ++s) {
    const State k1 = curve_tangent(sys, j, x);
    const State k2 = curve_tangent(sys, j, x + 0.5 * h * k1);
    const State k3 = curve_tangent(sys, j, x + 0.5 * h * k2);
    const State k4 = curve_tangent(sys, j, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  require_in_domain(sys, x, "rarefaction curve");
  return x;
}

ShockPoint shock_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u, const CurveOptions& opts) {
  require_family(sys, j);
  require_in_domain(sys, u, "shock curve start");
  if (!sys.genuinely_nonlinear(j)) {
    State w = rarefaction_curve(sys, j, sigma, u, opts);
    return {w, sigma == 0.0 ? sys.eigen_decompose(u).lambdas[j] : jump_speed(sys, j, u, w)};
  }
  const EigenFrame f0 = sys.eigen_decompose(u);
  if (sigma == 0.0) return {u, f0.lambdas[j]};

  const State r0 = f0.r(j);
  const double lam0 = f0.lambdas[j];
  const double target = sys.curve_rate(j) * sigma;
  const double slope0 = sys.nonlinearity(u, j, f0);

  // warm start from the previous locus point, rescaled to the new distance
  State last_dir = r0;
  auto mismatch = [&](double eps, HugoniotPoint& pt) {
    const State guess = u + eps * last_dir;
    pt = hugoniot_point(sys, j, eps, u, r0, &guess);
    if (eps != 0.0) last_dir = (pt.state - u) / eps;
    return sys.eigen_decompose(pt.state).lambdas[j] - lam0 - target;
  };

  double e0 = target / slope0;
  HugoniotPoint p0;
  double m0 = mismatch(e0, p0);
  const double tol = 1e-15 + 1e-13 * std::abs(target);
  if (std::abs(m0) <= tol) return {p0.state, p0.speed};
  // Newton step with the base slope, then secant updates.
  double e1 = e0 - m0 / slope0;
  HugoniotPoint p1;
  double m1 = mismatch(e1, p1);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (std::abs(m1) <= tol) return {p1.state, p1.speed};
    const double denom = m1 - m0;
    double e2 = denom != 0.0 ? e1 - m1 * (e1 - e0) / denom : e1 - m1 / slope0;
    e0 = e1;
    m0 = m1;
    e1 = e2;
    m1 = mismatch(e1, p1);
    if (e1 == e0) break;
  }
  if (std::abs(m1) <= 1e3 * tol) return {p1.state, p1.speed};
  throw NoConvergence("shock curve parametrization did not converge");
}

State lax_curve(const HyperbolicSystem& sys, int j, double sigma, const State& u, const CurveOptions& opts) {
  if (sigma >= 0.0 || !sys.genuinely_nonlinear(j)) return rarefaction_curve(sys, j, sigma, u, opts);
  return shock_curve(sys, j, sigma, u, opts).state;
}

std::vector<State> psi_states(const HyperbolicSystem& sys, const StrengthVector& sigma, const State& u_minus,
                              const CurveOptions& opts) {
  if (sigma.size() != sys.dim() || u_minus.size() != sys.dim()) throw DimensionMismatch("strength dimension mismatch");
  std::vector<State> states;
  states.reserve(sys.dim() + 1);
  states.push_back(u_minus);
  for (int j = 0; j < sys.dim(); ++j) states.push_back(lax_curve(sys, j, sigma[j], states.back(), opts));
  return states;
}

State compose_psi(const HyperbolicSystem& sys, const StrengthVector& sigma, const State& u_minus,
                  const CurveOptions& opts) {
  if (sigma.size() != sys.dim() || u_minus.size() != sys.dim()) throw DimensionMismatch("strength dimension mismatch");
  State u = u_minus;
  for (int j = 0; j < sys.dim(); ++j) u = lax_curve(sys, j, sigma[j], u, opts);
  return u;
}

State compose_shocks(const HyperbolicSystem& sys, const StrengthVector& q, const State& u_minus,
                     const CurveOptions& opts) {
  if (q.size() != sys.dim() || u_minus.size() != sys.dim()) throw DimensionMismatch("strength dimension mismatch");
  State u = u_minus;
  for (int j = 0; j < sys.dim(); ++j) u = shock_curve(sys, j, q[j], u, opts).state;
  return u;
}

StrengthVector solve_riemann(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus,
                             const CurveOptions& opts) {
  return invert(
      sys, u_minus, u_plus,
      [&](const State& s) { return compose_psi(sys, StrengthVector(s), u_minus, opts); }, opts, "solve_riemann");
}

StrengthVector invert_shocks(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus,
                             const CurveOptions& opts) {
  return invert(
      sys, u_minus, u_plus,
      [&](const State& s) { return compose_shocks(sys, StrengthVector(s), u_minus, opts); }, opts, "invert_shocks");
}

WaveFan::WaveFan(HyperbolicSystem sys, State um, State up, StrengthVector s, std::vector<Wave> w, CurveOptions opts)
    : system(std::move(sys)),
      u_minus(std::move(um)),
      u_plus(std::move(up)),
      sigma(std::move(s)),
      waves(std::move(w)),
      options(opts) {}

State WaveFan::evaluate(double xi) const {
  for (const Wave& w : waves) {
    if (xi < w.speed_left) return w.left;
    if (w.kind == WaveKind::Rarefaction && xi < w.speed_right) {
      const double tau = (xi - w.speed_left) / system.curve_rate(w.family);
      return rarefaction_curve(system, w.family, tau, w.left, options);
    }
  }
  return u_plus;
}

WaveFan riemann_fan(const HyperbolicSystem& sys, const State& u_minus, const State& u_plus, const CurveOptions& opts) {
  StrengthVector sigma = solve_riemann(sys, u_minus, u_plus, opts);
  std::vector<Wave> waves;
  State left = u_minus;
  for (int j = 0; j < sys.dim(); ++j) {
    if (sigma[j] == 0.0) continue;
    Wave w;
    w.family = j;
    w.strength = sigma[j];
    w.left = left;
    if (!sys.genuinely_nonlinear(j)) {
      w.kind = WaveKind::Contact;
      w.right = rarefaction_curve(sys, j, sigma[j], left, opts);
      w.speed_left = w.speed_right = jump_speed(sys, j, w.left, w.right);
      w.rh_residual = rh_residual(sys, w.left, w.right, w.speed_left);
    } else if (sigma[j] < 0.0) {
      w.kind = WaveKind::Shock;
      const ShockPoint p = shock_curve(sys, j, sigma[j], left, opts);
      w.right = p.state;
      w.speed_left = w.speed_right = p.speed;
      w.rh_residual = rh_residual(sys, w.left, w.right, p.speed);
    } else {
      w.kind = WaveKind::Rarefaction;
      w.right = rarefaction_curve(sys, j, sigma[j], left, opts);
      w.speed_left = sys.eigen_decompose(w.left).lambdas[j];
      w.speed_right = sys.eigen_decompose(w.right).lambdas[j];
    }
    left = w.right;
    waves.push_back(std::move(w));
  }
  return WaveFan(sys, u_minus, u_plus, std::move(sigma), std::move(waves), opts);
}

}  // namespace balaw
