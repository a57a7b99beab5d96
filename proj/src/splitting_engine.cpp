#include "balaw/splitting_engine.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace balaw {

namespace {

double reach_of(const PiecewiseConstantFn& u) {
  if (u.is_zero()) return 0.0;
  return std::max(std::abs(u.support_min()), std::abs(u.support_max()));
}

double kernel_reach(const ConvolutionKernel& q) {
  if (q.is_zero()) return 0.0;
  return std::max(std::abs(q.edges().front()), std::abs(q.edges().back()));
}

double speed_bound(const HyperbolicSystem& system) {
  return std::max(std::abs(system.min_speed()), system.max_speed() + 1.0);
}

}  // namespace

FrontTrackingOptions splitting_tracking_defaults() {
  FrontTrackingOptions o;
  o.interaction_threshold = 0.0;
  o.strength_floor = 1e-7;
  return o;
}

double effective_ft_epsilon(double epsilon, const SplittingOptions& opts) {
  return opts.ft_epsilon > 0.0 ? opts.ft_epsilon : epsilon;
}

int effective_cells(const SourceSpec& spec, double ft_epsilon, double reach, const SplittingOptions& opts) {
  if (spec.kernel().is_zero()) return 1;
  if (opts.n_cells == kExactConvolution) return kExactConvolution;
  int n = opts.n_cells > 0 ? opts.n_cells
                           : std::min(opts.max_cells, static_cast<int>(std::ceil(4.0 / ft_epsilon - 1e-9)));
  // window ]-(1 + N^2)/N, N] must contain the profile
  return std::max(n, static_cast<int>(std::ceil(reach)) + 1);
}

PiecewiseConstantFn homogeneous_flow(const HyperbolicSystem& system, double s, const PiecewiseConstantFn& u,
                                     double ft_epsilon, const FrontTrackingOptions& tracking) {
  if (s == 0.0 || u.is_zero()) return u;
  FrontTrackingOptions o = tracking;
  o.epsilon = ft_epsilon;
  FrontState st = init_front_tracking(system, u, o);
  st.evolve(s);
  return st.sample();
}

PiecewiseConstantFn local_flow(const SourceSpec& spec, double s, const PiecewiseConstantFn& u, double ft_epsilon,
                               int n_cells, const SplittingOptions& opts) {
  if (s < 0.0) throw InvalidArgument("local flow needs s >= 0");
  if (s == 0.0) return u;
  const PiecewiseConstantFn moved = homogeneous_flow(spec.system(), s, u, ft_epsilon, opts.tracking);
  return euler_source_step(spec, s, moved, n_cells, opts.extra_cells);
}

PolygonalRun euler_polygonal(const SourceSpec& spec, const PiecewiseConstantFn& u0, double t, double epsilon,
                             const SplittingOptions& opts) {
  if (!(epsilon > 0.0)) throw InvalidArgument("polygonal step must be positive");
  if (epsilon > spec.s_max() * (1.0 + 1e-12)) throw InvalidArgument("polygonal step exceeds s_max");
  if (t < 0.0) throw InvalidArgument("polygonal needs t >= 0");
  const HyperbolicSystem& sys = spec.system();

  PolygonalRun run;
  run.epsilon = epsilon;
  run.ft_epsilon = effective_ft_epsilon(epsilon, opts);
  run.t_final = t;
  const double reach = reach_of(u0) + speed_bound(sys) * t + kernel_reach(spec.kernel()) * (t / epsilon + 1.0);
  run.n_cells = effective_cells(spec, run.ft_epsilon, reach, opts);

  FrontTrackingOptions tracking = opts.tracking;
  tracking.epsilon = run.ft_epsilon;

  const auto record = [&](double time, const PiecewiseConstantFn& u, std::size_t fronts) {
    if (!opts.record_functionals) return;
    TracePoint p;
    p.t = time;
    p.report = functional_report(sys, u, opts.constants, time);
    if (opts.reference)
      p.report.phi = stability_functional(sys, u, *opts.reference, opts.constants, tracking.curves);
    p.l1 = l1_norm(u);
    p.jumps = u.jumps();
    p.fronts = fronts;
    run.trace.push_back(std::move(p));
  };

  PiecewiseConstantFn u = u0;
  record(0.0, u, 0);
  if (opts.snapshot_every > 0) run.snapshots.emplace_back(0.0, u);

  const long full = static_cast<long>(std::floor(t / epsilon * (1.0 + 1e-12)));
  double time = 0.0;
  for (long k = 0; k <= full; ++k) {
    const double step = k < full ? epsilon : t - full * epsilon;
    if (step <= 1e-14 * std::max(1.0, t)) break;
    std::size_t fronts = 0;
    PiecewiseConstantFn moved = u;
    if (!u.is_zero()) {
      FrontState st = init_front_tracking(sys, u, tracking);
      st.evolve(step);
      moved = st.sample();
      fronts = st.max_fronts_seen();
      run.max_fronts = std::max(run.max_fronts, fronts);
      run.events += st.events();
    }
    u = euler_source_step(spec, step, moved, run.n_cells, opts.extra_cells);
    time = k < full ? (k + 1) * epsilon : t;
    record(time, u, fronts);
    if (opts.snapshot_every > 0 && (k + 1) % opts.snapshot_every == 0) run.snapshots.emplace_back(time, u);
  }
  if (opts.snapshot_every > 0 && run.snapshots.back().first < time) run.snapshots.emplace_back(time, u);
  run.final_profile = u;
  return run;
}

ConvergenceTable converge_semigroup(const SourceSpec& spec, const PiecewiseConstantFn& u0, double t,
                                    const std::vector<double>& epsilon_ladder, const SplittingOptions& opts) {
  if (epsilon_ladder.empty()) throw InvalidArgument("empty epsilon ladder");
  for (std::size_t k = 1; k < epsilon_ladder.size(); ++k)
    if (!(epsilon_ladder[k] < epsilon_ladder[k - 1])) throw InvalidArgument("epsilon ladder must decrease strictly");
  ConvergenceTable table;
  for (double eps : epsilon_ladder) {
    table.runs.push_back(euler_polygonal(spec, u0, t, eps, opts));
    ConvergenceRow row;
    row.epsilon = eps;
    row.distance = std::numeric_limits<double>::quiet_NaN();
    row.ratio = std::numeric_limits<double>::quiet_NaN();
    const std::size_t m = table.runs.size();
    if (m >= 2) {
      row.distance = l1_distance(table.runs[m - 1].final_profile, table.runs[m - 2].final_profile);
      if (m >= 3) {
        const double prev = table.rows.back().distance;
        row.ratio = prev / row.distance;
        if (row.distance >= prev) table.non_cauchy = true;
      }
    }
    table.rows.push_back(row);
  }
  table.profile = table.runs.back().final_profile;
  table.error_estimate = table.rows.size() >= 2 ? table.rows.back().distance : 0.0;
  return table;
}

std::vector<TangencyRow> tangency_defect(const SourceSpec& spec, const PiecewiseConstantFn& u,
                                         const std::vector<double>& t_ladder, int substeps,
                                         const SplittingOptions& opts) {
  if (substeps < 1) throw InvalidArgument("substeps must be positive");
  std::vector<TangencyRow> rows;
  SplittingOptions o = opts;
  o.record_functionals = false;
  o.snapshot_every = 0;
  for (double t : t_ladder) {
    if (!(t > 0.0)) throw InvalidArgument("tangency times must be positive");
    const double eps = t / substeps;
    const PolygonalRun run = euler_polygonal(spec, u, t, std::min(eps, spec.s_max()), o);
    const PiecewiseConstantFn st = homogeneous_flow(spec.system(), t, u, run.ft_epsilon, o.tracking);
    const PiecewiseConstantFn g = apply_source(spec, u, run.n_cells);
    rows.push_back({t, l1_distance(run.final_profile, st + t * g) / t});
  }
  return rows;
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("power fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("power fit needs positive data");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double p = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {std::exp((sy - p * sx) / m), p};
}

RateFit fit_exponential_decay(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("rate fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(y[k] > 0.0)) throw InvalidArgument("rate fit needs positive data");
    const double ly = std::log(y[k]);
    sx += x[k];
    sy += ly;
    sxx += x[k] * x[k];
    sxy += x[k] * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {std::exp((sy - slope * sx) / m), -slope};
}

DependenceSweep dependence_sweep(const SourceSpec& spec, const std::function<SourceSpec(double)>& perturb,
                                 const PiecewiseConstantFn& u0, double t, const std::vector<double>& etas,
                                 double epsilon, const SplittingOptions& opts) {
  SplittingOptions o = opts;
  o.record_functionals = false;
  o.snapshot_every = 0;
  const PolygonalRun base = euler_polygonal(spec, u0, t, epsilon, o);
  // both sides share one projection grid
  if (!spec.kernel().is_zero()) o.n_cells = base.n_cells;
  DependenceSweep out;
  std::vector<double> xs, ys;
  for (double eta : etas) {
    const PolygonalRun other = euler_polygonal(perturb(eta), u0, t, epsilon, o);
    const double d = l1_distance(base.final_profile, other.final_profile);
    out.rows.push_back({eta, d});
    out.coefficients.push_back(t > 0.0 && eta > 0.0 ? d / (eta * t) : 0.0);
    if (eta > 0.0 && d > 0.0) {
      xs.push_back(eta);
      ys.push_back(d);
    }
  }
  if (xs.size() >= 2) out.fit = fit_power(xs, ys);
  return out;
}

}  // namespace balaw
