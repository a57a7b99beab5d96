#include "balaw/hyperbolic_system.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace balaw {

namespace detail {

struct SystemData {
  SystemDefinition def;
  bool analytic_jacobian = false;
  bool analytic_second = false;
  EigenFrame base;
  std::vector<double> rates;
  double min_speed = 0.0;
  double max_speed = 0.0;
};

}  // namespace detail

namespace {

struct RawFrame {
  State lambdas;
  Matrix right;
};

std::string describe(const State& u) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
  os << ")";
  return os.str();
}

// Unit right eigenvectors and sorted real eigenvalues of a, no sign convention applied.
RawFrame raw_decompose(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  RawFrame out{State(n), Matrix(n, n)};
  if (n == 1) {
    out.lambdas[0] = a(0, 0);
    out.right(0, 0) = 1.0;
    return out;
  }
  if (n == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double diff = a(0, 0) - a(1, 1);
    const double disc = diff * diff + 4.0 * a(0, 1) * a(1, 0);
    if (!(disc >= 0.0)) throw NotStrictlyHyperbolic("complex eigenvalues");
    const double root = std::sqrt(disc);
    if (root < HyperbolicSystem::kGapTol)
      throw NotStrictlyHyperbolic("eigenvalue gap " + std::to_string(root) + " below tolerance");
    out.lambdas[0] = 0.5 * (tr - root);
    out.lambdas[1] = 0.5 * (tr + root);
    for (int j = 0; j < 2; ++j) {
      const double lam = out.lambdas[j];
      const double b11 = a(0, 0) - lam, b12 = a(0, 1);
      const double b21 = a(1, 0), b22 = a(1, 1) - lam;
      double x, y;
      if (b11 * b11 + b12 * b12 >= b21 * b21 + b22 * b22) {
        x = -b12;
        y = b11;
      } else {
        x = -b22;
        y = b21;
      }
      const double len = std::sqrt(x * x + y * y);
      out.right(0, j) = x / len;
      out.right(1, j) = y / len;
    }
    return out;
  }
  Eigen::EigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NotStrictlyHyperbolic("eigen solver failed");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  double scale = a.norm() + 1.0;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < n; ++i)
    if (std::abs(values[i].imag()) > 1e-12 * scale) throw NotStrictlyHyperbolic("complex eigenvalues");
  std::sort(order.begin(), order.end(), [&](int p, int q) { return values[p].real() < values[q].real(); });
  for (int j = 0; j < n; ++j) {
    out.lambdas[j] = values[order[j]].real();
    State v = vectors.col(order[j]).real();
    out.right.col(j) = v / v.norm();
  }
  for (int j = 0; j + 1 < n; ++j)
    if (out.lambdas[j + 1] - out.lambdas[j] < HyperbolicSystem::kGapTol)
      throw NotStrictlyHyperbolic("eigenvalue gap below tolerance");
  return out;
}

EigenFrame finish(RawFrame raw) {
  EigenFrame f;
  f.lambdas = std::move(raw.lambdas);
  f.right = std::move(raw.right);
  f.left = small_inverse(f.right);
  return f;
}

Matrix fd_jacobian(const SystemDefinition& def, const State& u) {
  const int n = def.n;
  const double h = 1e-6 * (1.0 + u.norm());
  Matrix j(n, n);
  for (int k = 0; k < n; ++k) {
    State up = u, um = u;
    up[k] += h;
    um[k] -= h;
    j.col(k) = (def.flux(up) - def.flux(um)) / (2.0 * h);
  }
  return j;
}

}  // namespace

HyperbolicSystem::HyperbolicSystem(SystemDefinition def) {
  if (def.n < 1 || def.n > kMaxDim) throw ConfigError("system dimension must be in [1, 4]");
  if (!def.flux) throw ConfigError("system requires a flux");
  if (static_cast<int>(def.kinds.size()) != def.n) throw ConfigError("one field kind per family required");
  if (!(def.omega_radius > 0.0)) throw ConfigError("omega_radius must be positive");

  auto data = std::make_shared<detail::SystemData>();
  data->analytic_jacobian = static_cast<bool>(def.jacobian);
  data->analytic_second = static_cast<bool>(def.second_derivative);
  data->def = std::move(def);
  data_ = data;
  const int n = data->def.n;

  // Base frame: LD fields get their largest component positive, GNL fields are
  // oriented so that lambda_j increases along r_j(0).
  RawFrame raw = raw_decompose(jacobian(State::Zero(n)));
  for (int j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    raw.right.col(j).cwiseAbs().maxCoeff(&imax);
    if (raw.right(imax, j) < 0.0) raw.right.col(j) *= -1.0;
  }
  data->base = finish(raw);
  data->rates.assign(n, 1.0);
  for (int j = 0; j < n; ++j) {
    if (data->def.kinds[j] != FieldKind::GenuinelyNonlinear) continue;
    double k = nonlinearity(State::Zero(n), j, data->base);
    if (std::abs(k) < 1e-8) throw ConfigError("field " + std::to_string(j) + " declared GNL but degenerate at 0");
    if (k < 0.0) {
      data->base.right.col(j) *= -1.0;
      data->base.left.row(j) *= -1.0;
      k = -k;
    }
    data->rates[j] = k;
  }

  // Sampled validation of hyperbolicity and field kinds; also records the speed range.
  const int per_axis = 5;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  double lo = data->base.lambdas[0], hi = data->base.lambdas[n - 1];
  const double r = 0.95 * data->def.omega_radius;
  for (int idx = 0; idx < total; ++idx) {
    State u(n);
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      u[i] = -r + 2.0 * r * (rem % per_axis) / (per_axis - 1);
      rem /= per_axis;
    }
    EigenFrame f = eigen_decompose(u);
    lo = std::min(lo, f.lambdas[0]);
    hi = std::max(hi, f.lambdas[n - 1]);
    for (int j = 0; j < n; ++j) {
      const double nl = nonlinearity(u, j, f);
      const double scale = 1.0 + jacobian(u).norm();
      if (data->def.kinds[j] == FieldKind::GenuinelyNonlinear) {
        if (!(nl > 1e-8)) throw ConfigError("field " + std::to_string(j) + " loses genuine nonlinearity at " + describe(u));
      } else if (std::abs(nl) > 1e-6 * scale) {
        throw ConfigError("field " + std::to_string(j) + " declared LD but grad(lambda).r = " + std::to_string(nl));
      }
    }
  }
  data->min_speed = lo;
  data->max_speed = hi;
}

const std::string& HyperbolicSystem::name() const { return data_->def.name; }
int HyperbolicSystem::dim() const { return data_->def.n; }
double HyperbolicSystem::omega_radius() const { return data_->def.omega_radius; }
FieldKind HyperbolicSystem::field_kind(int j) const { return data_->def.kinds.at(j); }
const std::vector<FieldKind>& HyperbolicSystem::field_kinds() const { return data_->def.kinds; }

bool HyperbolicSystem::in_domain(const State& u) const {
  if (u.size() != dim()) return false;
  if (!u.allFinite()) return false;
  return norm_inf(u) <= data_->def.omega_radius;
}

State HyperbolicSystem::flux(const State& u) const { return data_->def.flux(u); }

Matrix HyperbolicSystem::jacobian(const State& u) const {
  if (data_->analytic_jacobian) return data_->def.jacobian(u);
  return fd_jacobian(data_->def, u);
}

State HyperbolicSystem::second_derivative(const State& u, const State& v) const {
  if (data_->analytic_second) return data_->def.second_derivative(u, v);
  if (data_->analytic_jacobian) {
    const double h = 1e-5;
    return (data_->def.jacobian(u + h * v) - data_->def.jacobian(u - h * v)) * v / (2.0 * h);
  }
  const double h = 1e-4;
  return (flux(u + h * v) - 2.0 * flux(u) + flux(u - h * v)) / (h * h);
}

EigenFrame HyperbolicSystem::decompose_matrix(const Matrix& a) const {
  EigenFrame f = finish(raw_decompose(a));
  if (!data_->base.right.size()) return f;
  for (int j = 0; j < dim(); ++j) {
    if (f.right.col(j).dot(data_->base.right.col(j)) < 0.0) {
      f.right.col(j) *= -1.0;
      f.left.row(j) *= -1.0;
    }
  }
  return f;
}

EigenFrame HyperbolicSystem::eigen_decompose(const State& u) const {
  if (!in_domain(u)) throw NotInDomain("state " + describe(u) + " outside the domain");
  return decompose_matrix(jacobian(u));
}

double HyperbolicSystem::nonlinearity(const State& u, int j, const EigenFrame& frame) const {
  const State rj = frame.right.col(j);
  return frame.left.row(j).dot(second_derivative(u, rj));
}

double HyperbolicSystem::nonlinearity(const State& u, int j) const {
  return nonlinearity(u, j, eigen_decompose(u));
}

const EigenFrame& HyperbolicSystem::base_frame() const { return data_->base; }
const Matrix& HyperbolicSystem::R() const { return data_->base.right; }
const Matrix& HyperbolicSystem::R_inv() const { return data_->base.left; }
double HyperbolicSystem::curve_rate(int j) const { return data_->rates.at(j); }
double HyperbolicSystem::min_speed() const { return data_->min_speed; }
double HyperbolicSystem::max_speed() const { return data_->max_speed; }

EigenFrame eigen_decompose(const HyperbolicSystem& system, const State& u) { return system.eigen_decompose(u); }

double psystem_pressure(double tau) { return std::pow(tau, -kPSystemGamma); }
double psystem_pressure_derivative(double tau) { return -kPSystemGamma * std::pow(tau, -kPSystemGamma - 1.0); }

namespace {

HyperbolicSystem make_linear_diagonal() {
  SystemDefinition def;
  def.name = "LinearDiagonal";
  def.n = 2;
  def.flux = [](const State& u) {
    State f(2);
    f << -u[0], u[1];
    return f;
  };
  def.jacobian = [](const State&) {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 0) = -1.0;
    j(1, 1) = 1.0;
    return j;
  };
  def.second_derivative = [](const State&, const State&) { return State(State::Zero(2)); };
  def.kinds = {FieldKind::LinearlyDegenerate, FieldKind::LinearlyDegenerate};
  def.omega_radius = 1.0;
  return HyperbolicSystem(std::move(def));
}

HyperbolicSystem make_scalar_convex() {
  SystemDefinition def;
  def.name = "ScalarConvex";
  def.n = 1;
  def.flux = [](const State& u) {
    State f(1);
    f[0] = 0.5 * u[0] * u[0] + u[0];
    return f;
  };
  def.jacobian = [](const State& u) {
    Matrix j(1, 1);
    j(0, 0) = u[0] + 1.0;
    return j;
  };
  def.second_derivative = [](const State&, const State& v) {
    State d(1);
    d[0] = v[0] * v[0];
    return d;
  };
  def.kinds = {FieldKind::GenuinelyNonlinear};
  def.omega_radius = 0.5;
  return HyperbolicSystem(std::move(def));
}

HyperbolicSystem make_psystem() {
  SystemDefinition def;
  def.name = "PSystem";
  def.n = 2;
  def.flux = [](const State& u) {
    State f(2);
    f << -u[1], psystem_pressure(1.0 + u[0]);
    return f;
  };
  def.jacobian = [](const State& u) {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 1) = -1.0;
    j(1, 0) = psystem_pressure_derivative(1.0 + u[0]);
    return j;
  };
  def.second_derivative = [](const State& u, const State& v) {
    const double tau = 1.0 + u[0];
    const double p2 = kPSystemGamma * (kPSystemGamma + 1.0) * std::pow(tau, -kPSystemGamma - 2.0);
    State d(2);
    d << 0.0, p2 * v[0] * v[0];
    return d;
  };
  def.kinds = {FieldKind::GenuinelyNonlinear, FieldKind::GenuinelyNonlinear};
  def.omega_radius = 0.25;
  return HyperbolicSystem(std::move(def));
}

}  // namespace

HyperbolicSystem preset(Preset name) {
  switch (name) {
    case Preset::LinearDiagonal: return make_linear_diagonal();
    case Preset::ScalarConvex: return make_scalar_convex();
    case Preset::PSystem: return make_psystem();
  }
  throw UnknownPreset("unknown preset");
}

HyperbolicSystem preset(std::string_view name) {
  if (name == "LinearDiagonal") return preset(Preset::LinearDiagonal);
  if (name == "ScalarConvex") return preset(Preset::ScalarConvex);
  if (name == "PSystem") return preset(Preset::PSystem);
  throw UnknownPreset("unknown system preset '" + std::string(name) + "'");
}

std::string preset_name(Preset name) {
  switch (name) {
    case Preset::LinearDiagonal: return "LinearDiagonal";
    case Preset::ScalarConvex: return "ScalarConvex";
    case Preset::PSystem: return "PSystem";
  }
  return {};
}

std::vector<std::string> preset_names() { return {"LinearDiagonal", "ScalarConvex", "PSystem"}; }

}  // namespace balaw
