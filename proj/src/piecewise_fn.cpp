#include "balaw/piecewise_fn.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace balaw {

namespace {

bool negligible_jump(const State& a, const State& b) {
  return ((a - b).cwiseAbs().array() < kJumpThreshold).all();
}

void check_dim(int a, int b) {
  if (a != b) throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Calls fn(a, b, ua, va) on every bounded interval ]a, b] of the merged partition.
template <class Fn>
void for_each_interval(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v, Fn&& fn) {
  const auto& xu = u.breakpoints();
  const auto& xv = v.breakpoints();
  std::size_t iu = 0, iv = 0;
  bool started = false;
  double prev = 0.0;
  while (iu < xu.size() || iv < xv.size()) {
    double p;
    if (iv >= xv.size() || (iu < xu.size() && xu[iu] <= xv[iv]))
      p = xu[iu];
    else
      p = xv[iv];
    if (started) fn(prev, p, u.values()[iu], v.values()[iv]);
    if (iu < xu.size() && xu[iu] == p) ++iu;
    if (iv < xv.size() && xv[iv] == p) ++iv;
    prev = p;
    started = true;
  }
}

}  // namespace

PiecewiseConstantFn::PiecewiseConstantFn(int n) : n_(n), v_{State::Zero(n)} {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("state dimension out of range");
}

PiecewiseConstantFn::PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<State> values)
    : n_(values.empty() ? 0 : static_cast<int>(values.front().size())), x_(std::move(breakpoints)),
      v_(std::move(values)) {
  normalize();
}

void PiecewiseConstantFn::normalize() {
  if (v_.size() != x_.size() + 1) throw InvalidArgument("piecewise-constant function needs one more value than breakpoints");
  if (n_ < 1 || n_ > kMaxDim) throw InvalidArgument("state dimension out of range");
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!std::isfinite(x_[k])) throw InvalidArgument("non-finite breakpoint");
    if (k > 0 && !(x_[k - 1] < x_[k])) throw InvalidArgument("breakpoints must be strictly increasing");
  }
  for (const State& s : v_) {
    check_dim(static_cast<int>(s.size()), n_);
    if (!s.allFinite()) throw InvalidArgument("non-finite value");
  }
  if (!negligible_jump(v_.front(), State::Zero(n_)) || !negligible_jump(v_.back(), State::Zero(n_)))
    throw InvalidArgument("piecewise-constant function must vanish outside a bounded set");
  v_.front().setZero();
  v_.back().setZero();

  std::vector<double> x;
  std::vector<State> v;
  x.reserve(x_.size());
  v.reserve(v_.size());
  v.push_back(v_.front());
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (negligible_jump(v.back(), v_[k + 1])) continue;
    x.push_back(x_[k]);
    v.push_back(v_[k + 1]);
  }
  // a trailing merge can leave a tiny nonzero tail; the last value is zero by construction
  if (!v.back().isZero(0.0)) {
    v.back().setZero();
  }
  x_ = std::move(x);
  v_ = std::move(v);
}

PiecewiseConstantFn PiecewiseConstantFn::from_steps(int n, const std::vector<std::pair<double, State>>& steps) {
  std::vector<double> x;
  std::vector<State> v{State::Zero(n)};
  for (const auto& [pos, val] : steps) {
    check_dim(static_cast<int>(val.size()), n);
    x.push_back(pos);
    v.push_back(val);
  }
  return PiecewiseConstantFn(std::move(x), std::move(v));
}

State PiecewiseConstantFn::operator()(double x) const {
  const auto k = std::lower_bound(x_.begin(), x_.end(), x) - x_.begin();
  return v_[static_cast<std::size_t>(k)];
}

double PiecewiseConstantFn::sup_norm() const {
  double m = 0.0;
  for (const State& s : v_) m = std::max(m, norm_inf(s));
  return m;
}

PiecewiseConstantFn PiecewiseConstantFn::map(const std::function<State(const State&)>& fn) const {
  const State f0 = fn(State::Zero(n_));
  if (norm_inf(f0) > kJumpThreshold) throw InvalidArgument("pointwise map must fix the origin");
  std::vector<State> v;
  v.reserve(v_.size());
  v.push_back(State::Zero(static_cast<int>(f0.size())));
  for (std::size_t k = 1; k + 1 < v_.size(); ++k) v.push_back(fn(v_[k]));
  if (v_.size() > 1) v.push_back(State::Zero(static_cast<int>(f0.size())));
  return PiecewiseConstantFn(x_, std::move(v));
}

PiecewiseConstantFn combine(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v,
                            const std::function<State(const State&, const State&)>& fn) {
  check_dim(u.dim(), v.dim());
  std::vector<double> x;
  std::vector<State> vals{fn(State::Zero(u.dim()), State::Zero(u.dim()))};
  for_each_interval(u, v, [&](double a, double, const State& ua, const State& va) {
    x.push_back(a);
    vals.push_back(fn(ua, va));
  });
  if (!u.is_zero() || !v.is_zero()) {
    x.push_back(std::max(u.is_zero() ? v.support_max() : u.support_max(),
                         v.is_zero() ? u.support_max() : v.support_max()));
    vals.push_back(vals.front());
  }
  return PiecewiseConstantFn(std::move(x), std::move(vals));
}

PiecewiseConstantFn operator+(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v) {
  return combine(u, v, [](const State& a, const State& b) -> State { return a + b; });
}

PiecewiseConstantFn operator-(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v) {
  return combine(u, v, [](const State& a, const State& b) -> State { return a - b; });
}

PiecewiseConstantFn operator*(double a, const PiecewiseConstantFn& u) {
  return u.map([a](const State& s) -> State { return a * s; });
}

double total_variation(const PiecewiseConstantFn& u) {
  double tv = 0.0;
  for (std::size_t k = 0; k < u.jumps(); ++k) tv += norm1(u.right(k) - u.left(k));
  return tv;
}

double l1_norm(const PiecewiseConstantFn& u) {
  double s = 0.0;
  const auto& x = u.breakpoints();
  for (std::size_t k = 1; k < x.size(); ++k) s += (x[k] - x[k - 1]) * norm1(u.values()[k]);
  return s;
}

double l1_distance(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v) {
  check_dim(u.dim(), v.dim());
  double s = 0.0;
  for_each_interval(u, v, [&](double a, double b, const State& ua, const State& va) { s += (b - a) * norm1(ua - va); });
  return s;
}

std::vector<double> merged_breakpoints(const PiecewiseConstantFn& u, const PiecewiseConstantFn& v) {
  std::vector<double> out;
  out.reserve(u.jumps() + v.jumps());
  std::set_union(u.breakpoints().begin(), u.breakpoints().end(), v.breakpoints().begin(), v.breakpoints().end(),
                 std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

PiecewiseLinearFn::PiecewiseLinearFn(int n, std::vector<double> nodes, std::vector<State> values)
    : n_(n), x_(std::move(nodes)), v_(std::move(values)) {
  if (x_.size() != v_.size()) throw InvalidArgument("piecewise-linear function needs one value per node");
  for (std::size_t k = 1; k < x_.size(); ++k)
    if (!(x_[k - 1] < x_[k])) throw InvalidArgument("nodes must be strictly increasing");
  for (const State& s : v_) check_dim(static_cast<int>(s.size()), n_);
  if (!x_.empty()) {
    v_.front().setZero();
    v_.back().setZero();
  }
  cumulative_.reserve(x_.size());
  State acc = State::Zero(n_);
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (k > 0) acc += 0.5 * (x_[k] - x_[k - 1]) * (v_[k] + v_[k - 1]);
    cumulative_.push_back(acc);
  }
}

State PiecewiseLinearFn::operator()(double x) const {
  if (x_.empty() || x <= x_.front() || x >= x_.back()) return State::Zero(n_);
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
  const double t = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return (1.0 - t) * v_[k - 1] + t * v_[k];
}

State PiecewiseLinearFn::integral(double a, double b) const {
  const auto antiderivative = [&](double x) -> State {
    if (x_.empty() || x <= x_.front()) return State::Zero(n_);
    if (x >= x_.back()) return cumulative_.back();
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    return cumulative_[k] + 0.5 * (x - x_[k]) * (v_[k] + (*this)(x));
  };
  return antiderivative(b) - antiderivative(a);
}

double PiecewiseLinearFn::l1_norm() const {
  double s = 0.0;
  for (std::size_t k = 1; k < x_.size(); ++k) {
    const double h = x_[k] - x_[k - 1];
    for (int i = 0; i < n_; ++i) {
      const double a = v_[k - 1][i], b = v_[k][i];
      if (a * b >= 0.0)
        s += 0.5 * h * (std::abs(a) + std::abs(b));
      else
        s += 0.5 * h * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
  }
  return s;
}

double PiecewiseLinearFn::total_variation() const {
  double s = 0.0;
  for (std::size_t k = 1; k < x_.size(); ++k) s += norm1(v_[k] - v_[k - 1]);
  return s;
}

// ---------------------------------------------------------------------------

ConvolutionKernel::ConvolutionKernel(std::vector<double> edges, std::vector<State> values)
    : n_(values.empty() ? 1 : static_cast<int>(values.front().size())), edges_(std::move(edges)),
      values_(std::move(values)) {
  if (values_.empty()) {
    edges_.clear();
    return;
  }
  if (edges_.size() != values_.size() + 1) throw InvalidArgument("kernel needs one more edge than values");
  for (std::size_t k = 1; k < edges_.size(); ++k)
    if (!(edges_[k - 1] < edges_[k])) throw InvalidArgument("kernel edges must be strictly increasing");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    check_dim(static_cast<int>(values_[k].size()), n_);
    l1_ += (edges_[k + 1] - edges_[k]) * norm1(values_[k]);
  }
}

ConvolutionKernel ConvolutionKernel::box(int n, double alpha, double w) {
  if (!(w > 0.0)) throw InvalidArgument("box kernel needs positive half-width");
  if (alpha == 0.0) return zero(n);
  return ConvolutionKernel({-w, w}, {State::Constant(n, alpha / (2.0 * w * n))});
}

ConvolutionKernel ConvolutionKernel::discretize(int n, const std::function<double(double)>& q, double a, double b,
                                                double mesh, double alpha) {
  if (!(b > a) || !(mesh > 0.0)) throw InvalidArgument("kernel discretization needs a < b and mesh > 0");
  if (alpha == 0.0) return zero(n);
  const int cells = std::max(1, static_cast<int>(std::ceil((b - a) / mesh - 1e-9)));
  const double h = (b - a) / cells;
  std::vector<double> edges(cells + 1);
  std::vector<double> raw(cells);
  double mass = 0.0;
  for (int k = 0; k <= cells; ++k) edges[k] = a + k * h;
  for (int k = 0; k < cells; ++k) {
    raw[k] = q(a + (k + 0.5) * h);
    mass += h * std::abs(raw[k]) * n;
  }
  if (!(mass > 0.0)) throw InvalidArgument("kernel profile has zero mass");
  std::vector<State> values;
  values.reserve(cells);
  for (int k = 0; k < cells; ++k) values.push_back(State::Constant(n, raw[k] * alpha / mass));
  return ConvolutionKernel(std::move(edges), std::move(values));
}

ConvolutionKernel ConvolutionKernel::exponential(int n, double alpha, double mesh, double cutoff) {
  return discretize(n, [](double x) { return 0.5 * std::exp(-std::abs(x)); }, -cutoff, cutoff, mesh, alpha);
}

ConvolutionKernel ConvolutionKernel::scaled(double a) const {
  if (a == 0.0 || is_zero()) return zero(n_);
  std::vector<State> v = values_;
  for (State& s : v) s *= a;
  return ConvolutionKernel(edges_, std::move(v));
}

ConvolutionKernel ConvolutionKernel::operator+(const ConvolutionKernel& other) const {
  if (is_zero()) return other;
  if (other.is_zero()) return *this;
  check_dim(n_, other.n_);
  std::vector<double> edges;
  std::set_union(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end(), std::back_inserter(edges));
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto value_at = [](const ConvolutionKernel& k, double mid) -> State {
    if (mid <= k.edges_.front() || mid >= k.edges_.back()) return State::Zero(k.n_);
    const auto i = std::upper_bound(k.edges_.begin(), k.edges_.end(), mid) - k.edges_.begin() - 1;
    return k.values_[static_cast<std::size_t>(i)];
  };
  std::vector<State> values;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    values.push_back(value_at(*this, mid) + value_at(other, mid));
  }
  return ConvolutionKernel(std::move(edges), std::move(values));
}

// ---------------------------------------------------------------------------

PiecewiseLinearFn convolve(const ConvolutionKernel& q, const PiecewiseConstantFn& u) {
  const int n = u.dim();
  if (q.is_zero() || u.is_zero()) return PiecewiseLinearFn(n);
  check_dim(q.dim(), n);

  // Q = sum_a dQ_a H(. - e_a), u = sum_b du_b H(. - x_b), and H * H shifted is a ramp, so
  // Q * u (x) = sum_{a,b} dQ_a du_b (x - e_a - x_b)_+.
  const auto& e = q.edges();
  const auto& qv = q.values();
  std::vector<State> dq(e.size());
  dq[0] = qv[0];
  for (std::size_t a = 1; a < qv.size(); ++a) dq[a] = qv[a] - qv[a - 1];
  dq[e.size() - 1] = -qv.back();

  struct Ramp {
    double pos;
    State coef;
  };
  std::vector<Ramp> ramps;
  ramps.reserve(e.size() * u.jumps());
  for (std::size_t b = 0; b < u.jumps(); ++b) {
    const State du = u.right(b) - u.left(b);
    for (std::size_t a = 0; a < e.size(); ++a) ramps.push_back({e[a] + u.breakpoints()[b], dq[a].cwiseProduct(du)});
  }
  std::sort(ramps.begin(), ramps.end(), [](const Ramp& l, const Ramp& r) { return l.pos < r.pos; });

  std::vector<double> nodes;
  std::vector<State> slopes;
  for (const Ramp& r : ramps) {
    if (!nodes.empty() && r.pos == nodes.back()) {
      slopes.back() += r.coef;
    } else {
      nodes.push_back(r.pos);
      slopes.push_back(r.coef);
    }
  }
  std::vector<State> values(nodes.size(), State::Zero(n));
  State slope = State::Zero(n);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    slope += slopes[k];
    values[k + 1] = values[k] + slope * (nodes[k + 1] - nodes[k]);
  }
  return PiecewiseLinearFn(n, std::move(nodes), std::move(values));
}

std::pair<long, long> projection_window(int n_cells) {
  if (n_cells < 1) throw InvalidArgument("projection needs N >= 1");
  const long n2 = static_cast<long>(n_cells) * n_cells;
  return {-1 - n2, -1 + n2};
}

namespace {

// Cells of the window meeting [lo, hi].
std::pair<long, long> cells_covering(int n_cells, double lo, double hi) {
  const auto [kmin, kmax] = projection_window(n_cells);
  const long a = std::max(kmin, static_cast<long>(std::floor(lo * n_cells)) - 1);
  const long b = std::min(kmax, static_cast<long>(std::ceil(hi * n_cells)));
  return {a, b};
}

}  // namespace

PiecewiseConstantFn project(const PiecewiseConstantFn& u, int n_cells) {
  const int n = u.dim();
  if (u.is_zero()) {
    projection_window(n_cells);
    return PiecewiseConstantFn(n);
  }
  const auto [k0, k1] = cells_covering(n_cells, u.support_min(), u.support_max());
  if (k0 > k1) return PiecewiseConstantFn(n);
  const auto& x = u.breakpoints();
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(k1 - k0 + 2));
  for (long k = k0; k <= k1 + 1; ++k) cuts.push_back(static_cast<double>(k) / n_cells);

  std::vector<State> avg(cuts.size() - 1, State::Zero(n));
  // sweep intervals ]x_{j-1}, x_j] of u against the cells
  std::size_t c = 0;
  for (std::size_t j = 1; j < x.size() && c < avg.size(); ++j) {
    const double a = x[j - 1], b = x[j];
    const State& val = u.values()[j];
    while (c < avg.size() && cuts[c + 1] <= a) ++c;
    for (std::size_t cc = c; cc < avg.size() && cuts[cc] < b; ++cc) {
      const double overlap = std::min(b, cuts[cc + 1]) - std::max(a, cuts[cc]);
      if (overlap > 0) avg[cc] += overlap * val;
    }
  }
  for (State& s : avg) s *= n_cells;
  std::vector<double> bx(cuts.begin(), cuts.end());
  std::vector<State> bv;
  bv.reserve(avg.size() + 2);
  bv.push_back(State::Zero(n));
  for (State& s : avg) bv.push_back(std::move(s));
  bv.push_back(State::Zero(n));
  return PiecewiseConstantFn(std::move(bx), std::move(bv));
}

std::vector<State> interval_averages(const PiecewiseLinearFn& f, const std::vector<double>& cuts) {
  std::vector<State> out;
  if (cuts.size() < 2) return out;
  out.reserve(cuts.size() - 1);
  const auto& x = f.nodes();
  const auto& v = f.values();
  const int n = f.dim();
  // running antiderivative with a node pointer: cuts are sorted
  std::size_t k = 0;
  State cum = State::Zero(n);  // integral up to x[k]
  const auto antiderivative = [&](double t) -> State {
    if (x.empty() || t <= x.front()) return State::Zero(n);
    while (k + 1 < x.size() && x[k + 1] <= t) {
      cum += 0.5 * (x[k + 1] - x[k]) * (v[k] + v[k + 1]);
      ++k;
    }
    if (k + 1 >= x.size()) return cum;
    const double s = (t - x[k]) / (x[k + 1] - x[k]);
    const State ft = (1.0 - s) * v[k] + s * v[k + 1];
    return cum + 0.5 * (t - x[k]) * (v[k] + ft);
  };
  State prev = antiderivative(cuts.front());
  for (std::size_t c = 1; c < cuts.size(); ++c) {
    const State cur = antiderivative(cuts[c]);
    out.push_back((cur - prev) / (cuts[c] - cuts[c - 1]));
    prev = cur;
  }
  return out;
}

PiecewiseConstantFn project(const PiecewiseLinearFn& f, int n_cells) {
  const int n = f.dim();
  if (f.nodes().empty()) {
    projection_window(n_cells);
    return PiecewiseConstantFn(n);
  }
  const auto [k0, k1] = cells_covering(n_cells, f.nodes().front(), f.nodes().back());
  if (k0 > k1) return PiecewiseConstantFn(n);
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(k1 - k0 + 2));
  for (long k = k0; k <= k1 + 1; ++k) cuts.push_back(static_cast<double>(k) / n_cells);
  std::vector<State> avg = interval_averages(f, cuts);
  std::vector<State> bv;
  bv.reserve(avg.size() + 2);
  bv.push_back(State::Zero(n));
  for (State& s : avg) bv.push_back(std::move(s));
  bv.push_back(State::Zero(n));
  return PiecewiseConstantFn(std::move(cuts), std::move(bv));
}

PiecewiseConstantFn convolve_projected(const ConvolutionKernel& q, const PiecewiseConstantFn& u, int n_cells) {
  return project(convolve(q, u), n_cells);
}

}  // namespace balaw
