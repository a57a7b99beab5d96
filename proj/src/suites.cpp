#include "balaw/errors.hpp"
#include "balaw/experiments.hpp"
#include "balaw/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace balaw {

namespace {

constexpr double kRoundTripTol = 1e-8;
constexpr double kRankineHugoniotTol = 1e-9;

/// Every value lies within tol * |ref| of the first one; an all-zero ladder is stable.
bool stable_ladder(const std::vector<double>& values, double tol) {
  if (values.empty()) return true;
  const double ref = values.front();
  for (double v : values)
    if (std::abs(v - ref) > tol * std::abs(ref)) return false;
  return true;
}

State random_state(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> d(-radius, radius);
  State s(n);
  for (int i = 0; i < n; ++i) s[i] = d(rng);
  return s;
}

/// Uniform direction in the l1 sphere, radius uniform in [0, r].
StrengthVector random_strengths(std::mt19937_64& rng, int n, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0), d(-1.0, 1.0);
  State s(n);
  for (int i = 0; i < n; ++i) s[i] = d(rng);
  const double norm = norm1(s);
  return norm > 0.0 ? StrengthVector(s * (u(rng) * r / norm)) : StrengthVector::zero(n);
}

PiecewiseConstantFn sample_profile(SuiteContext& ctx) {
  std::uniform_int_distribution<int> jumps(2, std::max(2, ctx.config.datum.random_jumps > 0 ? ctx.config.datum.random_jumps : 8));
  return random_domain_profile(ctx.system, ctx.rng, jumps(ctx.rng), ctx.constants, ctx.config.datum.fill);
}

PiecewiseConstantFn the_datum(SuiteContext& ctx) {
  return initial_datum(ctx.config, ctx.system, ctx.rng, ctx.constants);
}

SplittingOptions splitting_options(const SuiteContext& ctx) {
  SplittingOptions o;
  o.record_functionals = false;
  o.constants = ctx.constants;
  if (ctx.config.params.n_cells >= 0) o.n_cells = ctx.config.params.n_cells;
  return o;
}

double max_of(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

/// Strictly decreasing, or identically zero.
bool decreasing(const std::vector<double>& v) {
  if (max_of(v) == 0.0) return true;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

std::string tag(const std::string& suite, const SuiteContext& ctx) { return suite + "__" + ctx.system.name(); }

// ---------------------------------------------------------------------------------------

SuiteResult riemann_roundtrip(SuiteContext& ctx) {
  SuiteResult r;
  const HyperbolicSystem& sys = ctx.system;
  const int n = sys.dim();
  CsvTable table({"sample", "sigma_l1", "psi_error", "psi_inverse_error", "shock_error", "max_rh_residual"});
  double worst_psi = 0.0, worst_inv = 0.0, worst_shock = 0.0, worst_rh = 0.0;
  long shocks = 0;
  for (int k = 0; k < ctx.config.params.samples; ++k) {
    const State um = random_state(ctx.rng, n, 0.5 * sys.omega_radius());
    const StrengthVector sigma = random_strengths(ctx.rng, n, 0.05);
    const State up = compose_psi(sys, sigma, um);
    const double e_psi = norm1(solve_riemann(sys, um, up).values - sigma.values);
    const double e_inv = norm1(compose_psi(sys, solve_riemann(sys, um, up), um) - up);
    const State vs = compose_shocks(sys, sigma, um);
    const double e_shock = norm1(invert_shocks(sys, um, vs).values - sigma.values);
    double rh = 0.0;
    for (const Wave& w : riemann_fan(sys, um, up).waves)
      if (w.kind != WaveKind::Rarefaction) {
        rh = std::max(rh, w.rh_residual);
        ++shocks;
      }
    // every link of the shock gluing is itself an admissible jump
    State from = um;
    for (int j = 0; j < n; ++j) {
      if (sigma[j] == 0.0) continue;
      const ShockPoint p = shock_curve(sys, j, sigma[j], from);
      rh = std::max(rh, rh_residual(sys, from, p.state, p.speed));
      from = p.state;
      ++shocks;
    }
    worst_psi = std::max(worst_psi, e_psi);
    worst_inv = std::max(worst_inv, e_inv);
    worst_shock = std::max(worst_shock, e_shock);
    worst_rh = std::max(worst_rh, rh);
    table.row({static_cast<double>(k), sigma.l1(), e_psi, e_inv, e_shock, rh});
  }
  ctx.tables.emplace(tag("riemann_roundtrip", ctx), std::move(table));
  r.add("samples", ctx.config.params.samples);
  r.add("jumps_checked", static_cast<double>(shocks));
  r.add("max_psi_error", worst_psi);
  r.add("max_psi_inverse_error", worst_inv);
  r.add("max_shock_error", worst_shock);
  r.add("max_rh_residual", worst_rh);
  r.check(worst_psi <= kRoundTripTol && worst_inv <= kRoundTripTol, "Psi round trip above 1e-8");
  r.check(worst_shock <= kRoundTripTol, "shock gluing round trip above 1e-8");
  r.check(worst_rh <= kRankineHugoniotTol, "Rankine-Hugoniot residual above 1e-9");
  return r;
}

SuiteResult functional_equivalence(SuiteContext& ctx) {
  SuiteResult r;
  const HyperbolicSystem& sys = ctx.system;
  CsvTable table({"kind", "sample", "functional", "reference", "ratio"});
  double c_ups = 1.0, c_phi = 1.0;
  for (int k = 0; k < ctx.config.params.samples; ++k) {
    const PiecewiseConstantFn u = sample_profile(ctx);
    const double ups = upsilon(decompose(sys, u), sys.field_kinds(), ctx.constants);
    const double tv = total_variation(u);
    if (tv > 0.0) c_ups = std::max({c_ups, ups / tv, tv / ups});
    table.row({0.0, static_cast<double>(k), ups, tv, tv > 0.0 ? ups / tv : 1.0});
  }
  for (int k = 0; k < ctx.config.params.samples; ++k) {
    const PiecewiseConstantFn v = sample_profile(ctx);
    const PiecewiseConstantFn w = sample_profile(ctx);
    const double phi = stability_functional(sys, v, w, ctx.constants);
    const double d = l1_distance(v, w);
    if (d > 0.0) c_phi = std::max({c_phi, phi / d, d / phi});
    table.row({1.0, static_cast<double>(k), phi, d, d > 0.0 ? phi / d : 1.0});
  }
  ctx.tables.emplace(tag("functional_equivalence", ctx), std::move(table));
  const double c = std::max(c_ups, c_phi);
  r.add("samples", ctx.config.params.samples);
  r.add("C_upsilon_tv", c_ups);
  r.add("C_phi_l1", c_phi);
  r.add("C", c);
  r.check(c <= ctx.config.params.max_equivalence, "equivalence constant exceeds the limit");
  return r;
}

SuiteResult lemma24(SuiteContext& ctx) {
  SuiteResult r;
  const HyperbolicSystem& sys = ctx.system;
  const auto& kinds = sys.field_kinds();
  const SuiteParams& p = ctx.config.params;
  const double c = ctx.source.c_certified();
  r.add("c", c);
  r.add("kernel_l1", ctx.source.kernel().l1_norm());
  r.check(c > 0.0, "source is not dissipative");
  r.check(ctx.source.kernel_within_cap(), "kernel mass above 0.05 c");

  struct Sample {
    PiecewiseConstantFn u, w;
    double ups, q, phi;
  };
  std::vector<Sample> corpus;
  for (int k = 0; k < p.samples; ++k) {
    Sample s{sample_profile(ctx), sample_profile(ctx), 0, 0, 0};
    const WaveDecomposition d = decompose(sys, s.u);
    s.ups = upsilon(d, kinds, ctx.constants);
    s.q = interaction_potential(d, kinds);
    s.phi = stability_functional(sys, s.u, s.w, ctx.constants);
    corpus.push_back(std::move(s));
  }

  CsvTable table({"s", "sample", "upsilon", "upsilon_after", "upsilon_bound", "Q", "Q_after", "phi", "phi_after",
                  "phi_bound"});
  long violations_u = 0, violations_phi = 0;
  double worst_u = -std::numeric_limits<double>::infinity(), worst_phi = worst_u;
  std::vector<double> ks;
  for (double s : p.s_values) {
    double k_s = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const Sample& smp = corpus[k];
      const PiecewiseConstantFn fu = euler_source_step(ctx.source, s, smp.u, kExactConvolution);
      const PiecewiseConstantFn fw = euler_source_step(ctx.source, s, smp.w, kExactConvolution);
      const WaveDecomposition d = decompose(sys, fu);
      const double ups = upsilon(d, kinds, ctx.constants);
      const double q = interaction_potential(d, kinds);
      const double phi = stability_functional(sys, fu, fw, ctx.constants);
      const double bound_u = (1.0 - c / 8.0 * s) * smp.ups;
      const double bound_phi = (1.0 - c / 4.0 * s) * smp.phi;
      if (ups - bound_u > p.slack) ++violations_u;
      if (phi - bound_phi > p.slack) ++violations_phi;
      worst_u = std::max(worst_u, ups - bound_u);
      worst_phi = std::max(worst_phi, phi - bound_phi);
      if (smp.ups > 0.0) k_s = std::max(k_s, (q - smp.q) / (s * smp.ups * smp.ups));
      table.row({s, static_cast<double>(k), smp.ups, ups, bound_u, smp.q, q, smp.phi, phi, bound_phi});
    }
    ks.push_back(std::isfinite(k_s) ? k_s : 0.0);
    r.add("K_interaction@" + format_number(s), ks.back());
  }
  ctx.tables.emplace(tag("lemma24", ctx), std::move(table));
  r.add("samples", static_cast<double>(corpus.size()));
  r.add("upsilon_violations", static_cast<double>(violations_u));
  r.add("phi_violations", static_cast<double>(violations_phi));
  r.add("worst_upsilon_excess", worst_u);
  r.add("worst_phi_excess", worst_phi);
  r.add("K_interaction", max_of(ks));
  r.check(violations_u == 0, "Upsilon decay violated");
  r.check(violations_phi == 0, "Phi decay violated");
  r.check(stable_ladder(ks, p.stability), "interaction growth constant unstable across s");
  return r;
}

SuiteResult lemma32(SuiteContext& ctx) {
  SuiteResult r;
  const HyperbolicSystem& sys = ctx.system;
  const SuiteParams& p = ctx.config.params;
  const double c = ctx.source.c_certified();
  const int cells = p.n_cells > 0 ? p.n_cells : 512;
  r.add("c", c);
  r.add("n_cells", cells);
  r.check(c > 0.0, "source is not dissipative");
  r.check(ctx.source.kernel_within_cap(), "kernel mass above 0.05 c");

  std::vector<std::pair<PiecewiseConstantFn, double>> corpus;
  for (int k = 0; k < p.samples; ++k) {
    PiecewiseConstantFn v = sample_profile(ctx);
    const double V = linear_functional(decompose(sys, v));
    corpus.emplace_back(std::move(v), V);
  }
  CsvTable table({"s", "sample", "V", "V_after", "bound"});
  long violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (double s : p.s_values)
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const PiecewiseConstantFn fv = euler_source_step(ctx.source, s, corpus[k].first, cells);
      const double after = linear_functional(decompose(sys, fv));
      const double bound = (1.0 - c / 4.0 * s) * corpus[k].second;
      if (after - bound > p.slack) ++violations;
      worst = std::max(worst, after - bound);
      table.row({s, static_cast<double>(k), corpus[k].second, after, bound});
    }
  ctx.tables.emplace(tag("lemma32", ctx), std::move(table));
  r.add("samples", static_cast<double>(corpus.size()));
  r.add("V_violations", static_cast<double>(violations));
  r.add("worst_V_excess", worst);
  r.check(violations == 0, "V decay violated");

  // size estimates behind the decay, for Psi and for the shock gluing
  CsvTable sizes({"curve", "s", "K_size", "K_size_bis"});
  for (const bool shocks : {false, true}) {
    const SizeEstimateReport rep = size_estimates(sys, ctx.source.local(), ctx.rng, 500, p.s_values, shocks);
    const std::string curve = shocks ? "shock" : "psi";
    r.add("size_samples_" + curve, rep.samples);
    for (std::size_t k = 0; k < rep.s_values.size(); ++k) {
      sizes.row(std::vector<std::string>{curve, format_number(rep.s_values[k]), format_number(rep.k_size[k]),
                                         format_number(rep.k_size_bis[k])});
      r.add("K_size_" + curve + "@" + format_number(rep.s_values[k]), rep.k_size[k]);
      r.add("K_size_bis_" + curve + "@" + format_number(rep.s_values[k]), rep.k_size_bis[k]);
    }
    r.check(stable_ladder(rep.k_size, p.stability), "size estimate constant unstable across s (" + curve + ")");
    r.check(stable_ladder(rep.k_size_bis, p.stability),
            "dissipative size estimate constant unstable across s (" + curve + ")");
  }
  ctx.tables.emplace(tag("size_estimates", ctx), std::move(sizes));
  return r;
}

SuiteResult srs_monotone(SuiteContext& ctx) {
  SuiteResult r;
  const SuiteParams& p = ctx.config.params;
  const double t = ctx.config.t_final;
  std::vector<std::pair<PiecewiseConstantFn, PiecewiseConstantFn>> corpus;
  for (int k = 0; k < p.pairs; ++k) {
    PiecewiseConstantFn u = sample_profile(ctx);
    PiecewiseConstantFn w = sample_profile(ctx);
    corpus.emplace_back(std::move(u), std::move(w));
  }
  const MonotonicityLadder m = monotonicity_ladder(ctx.system, corpus, p, t, ctx.constants);
  CsvTable table({"ft_epsilon", "upsilon_increment", "phi_increment", "events"});
  for (std::size_t k = 0; k < m.epsilons.size(); ++k) {
    const double e = m.epsilons[k];
    table.row({e, m.upsilon_increments[k], m.phi_increments[k], static_cast<double>(m.events[k])});
    r.add("upsilon_increment@" + format_number(e), m.upsilon_increments[k]);
    r.add("phi_increment@" + format_number(e), m.phi_increments[k]);
  }
  ctx.tables.emplace(tag("srs_monotone", ctx), std::move(table));
  r.add("K_upsilon", m.k_upsilon);
  r.add("K_phi", m.k_phi);
  r.add("t_final", t);
  r.check(m.upsilon_ok, "Upsilon increments do not scale with epsilon");
  r.check(m.phi_ok, "Phi increments do not scale with epsilon");
  return r;
}

bool exact_oracle_available(const SuiteContext& ctx) {
  return ctx.system.name() == "LinearDiagonal" && ctx.source.local().name == "LinearDamping" &&
         ctx.source.kernel().is_zero();
}

/// e^{-beta t} u0 transported along the characteristic families.
PiecewiseConstantFn damped_transport(const HyperbolicSystem& sys, const PiecewiseConstantFn& u0, double t,
                                     double factor) {
  const int n = sys.dim();
  const EigenFrame& frame = sys.base_frame();
  PiecewiseConstantFn out(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> x;
    for (double b : u0.breakpoints()) x.push_back(b + frame.lambdas[j] * t);
    std::vector<State> v;
    for (const State& s : u0.values()) v.push_back(factor * frame.l(j).dot(s) * frame.r(j));
    out = out + PiecewiseConstantFn(x, v);
  }
  return out;
}

SuiteResult polygonal_converge(SuiteContext& ctx) {
  SuiteResult r;
  const std::vector<double>& ladder = ctx.config.epsilon_ladder;
  const double t = ctx.config.t_final;
  const PiecewiseConstantFn u0 = the_datum(ctx);
  const ConvergenceTable table = converge_semigroup(ctx.source, u0, t, ladder, splitting_options(ctx));
  const bool oracle = exact_oracle_available(ctx);
  PiecewiseConstantFn exact(ctx.system.dim());
  if (oracle) {
    const double beta = -ctx.source.local().dg(State::Zero(ctx.system.dim()))(0, 0);
    exact = damped_transport(ctx.system, u0, t, std::exp(-beta * t));
  }
  CsvTable csv({"epsilon", "cauchy_distance", "ratio", "exact_error", "max_fronts", "n_cells"});
  std::vector<double> distances, errors;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const ConvergenceRow& row = table.rows[k];
    const double err = oracle ? l1_distance(table.runs[k].final_profile, exact) : std::nan("");
    if (k > 0) distances.push_back(row.distance);
    if (oracle) errors.push_back(err);
    csv.row({row.epsilon, row.distance, row.ratio, err, static_cast<double>(table.runs[k].max_fronts),
             static_cast<double>(table.runs[k].n_cells)});
  }
  ctx.tables.emplace(tag("polygonal_converge", ctx), std::move(csv));
  r.add("t_final", t);
  r.add("datum_l1", l1_norm(u0));
  r.add("error_estimate", table.error_estimate);
  for (std::size_t k = 0; k < distances.size(); ++k) r.add("cauchy@" + format_number(ladder[k + 1]), distances[k]);
  r.check(decreasing(distances), "Cauchy distances do not decrease");
  if (oracle) {
    double c_fit = 0.0;
    for (std::size_t k = 0; k < errors.size(); ++k) {
      r.add("exact_error@" + format_number(ladder[k]), errors[k]);
      c_fit = std::max(c_fit, errors[k] / ladder[k]);
    }
    r.add("C_exact", c_fit);
    if (max_of(errors) > 0.0) {
      const PowerFit fit = fit_power(ladder, errors);
      r.add("order", fit.exponent);
      r.check(fit.exponent >= ctx.config.params.min_order, "observed order below the minimum");
    }
  }
  return r;
}

SuiteResult tangency(SuiteContext& ctx) {
  SuiteResult r;
  const SuiteParams& p = ctx.config.params;
  const PiecewiseConstantFn u = the_datum(ctx);
  const std::vector<TangencyRow> rows = tangency_defect(ctx.source, u, p.t_values, p.substeps, splitting_options(ctx));
  CsvTable csv({"t", "defect"});
  std::vector<double> d;
  for (const TangencyRow& row : rows) {
    csv.row({row.t, row.defect});
    d.push_back(row.defect);
    r.add("defect@" + format_number(row.t), row.defect);
  }
  ctx.tables.emplace(tag("tangency", ctx), std::move(csv));
  if (max_of(d) > 0.0 && *std::min_element(d.begin(), d.end()) > 0.0) r.add("slope", fit_power(p.t_values, d).exponent);
  r.check(decreasing(d), "tangency defect does not decrease");
  return r;
}

SuiteResult contraction(SuiteContext& ctx) {
  SuiteResult r;
  const SuiteParams& p = ctx.config.params;
  const double eps = ctx.config.epsilon_ladder.front(), t = ctx.config.t_final;
  const double c = ctx.source.c_certified();
  SplittingOptions o = splitting_options(ctx);
  o.snapshot_every = 1;
  CsvTable csv({"pair", "t", "distance"});
  double kappa_min = std::numeric_limits<double>::infinity(), lip = 0.0;
  int fitted = 0;
  for (int k = 0; k < p.pairs; ++k) {
    const PiecewiseConstantFn u = sample_profile(ctx), w = sample_profile(ctx);
    const PolygonalRun a = euler_polygonal(ctx.source, u, t, eps, o);
    const PolygonalRun b = euler_polygonal(ctx.source, w, t, eps, o);
    std::vector<double> ts, ds;
    for (std::size_t m = 0; m < a.snapshots.size(); ++m) {
      const double d = l1_distance(a.snapshots[m].second, b.snapshots[m].second);
      csv.row({static_cast<double>(k), a.snapshots[m].first, d});
      if (d > 0.0) {
        ts.push_back(a.snapshots[m].first);
        ds.push_back(d);
      }
    }
    if (ts.size() < 2) continue;
    const RateFit fit = fit_exponential_decay(ts, ds);
    kappa_min = std::min(kappa_min, fit.rate);
    for (std::size_t m = 0; m < ts.size(); ++m) lip = std::max(lip, ds[m] / (ds.front() * std::exp(-fit.rate * ts[m])));
    ++fitted;
  }
  ctx.tables.emplace(tag("contraction", ctx), std::move(csv));
  r.add("c", c);
  r.add("pairs_fitted", fitted);
  if (fitted == 0) {
    r.notes.push_back("all pairs coincide; nothing to fit");
    return r;
  }
  r.add("kappa", kappa_min);
  r.add("lipschitz", lip);
  r.add("kappa_over_c8", c > 0.0 ? kappa_min / (c / 8.0) : std::nan(""));
  r.check(kappa_min > 0.0, "pairwise distance does not decay");
  return r;
}

SourceSpec perturbed(const SourceSpec& base, const std::string& what, double eta) {
  const int n = base.system().dim();
  if (what == "kernel") return base.with_kernel(base.kernel() + ConvolutionKernel::box(n, eta, 0.5));
  if (what == "local") {
    const LocalSource g = base.local();
    LocalSource h{g.name + "+eta", n, [g, eta](const State& u) -> State { return g(u) - eta * u; },
                  [g, eta, n](const State& u) -> Matrix { return g.dg(u) - eta * Matrix::Identity(n, n); }};
    return base.with_local(std::move(h));
  }
  // flux scaled by 1 + eta: same waves, faster
  const HyperbolicSystem sys = base.system();
  SystemDefinition def;
  def.name = sys.name();
  def.n = n;
  def.flux = [sys, eta](const State& u) -> State { return (1.0 + eta) * sys.flux(u); };
  def.jacobian = [sys, eta](const State& u) -> Matrix { return (1.0 + eta) * sys.jacobian(u); };
  def.second_derivative = [sys, eta](const State& u, const State& v) -> State {
    return (1.0 + eta) * sys.second_derivative(u, v);
  };
  def.kinds = sys.field_kinds();
  def.omega_radius = sys.omega_radius();
  return SourceSpec(HyperbolicSystem(def), base.local(), base.kernel(), base.s_max());
}

SuiteResult dependence(SuiteContext& ctx) {
  SuiteResult r;
  const SuiteParams& p = ctx.config.params;
  const double t = ctx.config.t_final, eps = ctx.config.epsilon_ladder.front();
  const PiecewiseConstantFn u0 = the_datum(ctx);
  CsvTable csv({"perturbation", "eta", "distance", "coefficient"});
  for (const std::string& what : p.perturbations) {
    const DependenceSweep sweep = dependence_sweep(
        ctx.source, [&](double eta) { return perturbed(ctx.source, what, eta); }, u0, t, p.etas, eps,
        splitting_options(ctx));
    for (std::size_t k = 0; k < sweep.rows.size(); ++k)
      csv.row(std::vector<std::string>{what, format_number(sweep.rows[k].eta), format_number(sweep.rows[k].distance),
                                       format_number(sweep.coefficients[k])});
    bool all_zero = true;
    for (const DependenceRow& row : sweep.rows) all_zero = all_zero && row.distance == 0.0;
    if (all_zero) {
      r.notes.push_back(what + ": no measurable effect on this datum");
      continue;
    }
    r.add(what + "_exponent", sweep.fit.exponent);
    r.add(what + "_coefficient", max_of(sweep.coefficients));
    r.check(sweep.fit.exponent >= 0.8 && sweep.fit.exponent <= 1.2, what + ": distance is not linear in eta");
  }
  ctx.tables.emplace(tag("dependence", ctx), std::move(csv));
  r.add("t_final", t);
  r.add("epsilon", eps);
  return r;
}

struct Entry {
  const char* name;
  SuiteFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"riemann-roundtrip", riemann_roundtrip}, {"functional-equivalence", functional_equivalence},
      {"lemma24", lemma24},                     {"lemma32", lemma32},
      {"srs-monotone", srs_monotone},           {"polygonal-converge", polygonal_converge},
      {"tangency", tangency},                   {"contraction", contraction},
      {"dependence", dependence},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Entry& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

SuiteFn find_suite(const std::string& name) {
  for (const Entry& e : registry())
    if (name == e.name) return e.fn;
  throw UnknownSuite("unknown suite '" + name + "'");
}

FrontTrackingOptions probe_tracking(double epsilon, bool accurate_only) {
  FrontTrackingOptions o;
  o.epsilon = epsilon;
  if (accurate_only) o.interaction_threshold = 0.0;
  return o;
}

MonotonicityProbe probe_monotonicity(const HyperbolicSystem& system, const PiecewiseConstantFn& u,
                                     const PiecewiseConstantFn& w, const FrontTrackingOptions& tracking, double t,
                                     const FunctionalConstants& consts) {
  MonotonicityProbe out;
  std::vector<double> times;
  for (const PiecewiseConstantFn* f : {&u, &w}) {
    FrontState st = init_front_tracking(system, *f, tracking);
    double last = upsilon(st.decomposition(), system.field_kinds(), consts);
    st.evolve(t, [&](const CollisionEvent& e, const FrontState& s) {
      const double now = upsilon(s.decomposition(), system.field_kinds(), consts);
      out.upsilon_increment = std::max(out.upsilon_increment, now - last);
      last = now;
      times.push_back(e.time);
    });
    out.events += st.events();
  }
  times.push_back(t);
  std::sort(times.begin(), times.end());
  FrontState a = init_front_tracking(system, u, tracking), b = init_front_tracking(system, w, tracking);
  double last = stability_functional(system, a.sample(), b.sample(), consts), prev = 0.0;
  for (double tau : times) {
    if (tau <= prev + 1e-12) continue;
    // just past the event so both sides see the outgoing fronts
    const double at = std::min(t, tau + 1e-11);
    a.evolve(at);
    b.evolve(at);
    const double now = stability_functional(system, a.sample(), b.sample(), consts);
    out.phi_increment = std::max(out.phi_increment, now - last);
    last = now;
    prev = at;
  }
  return out;
}

MonotonicityLadder monotonicity_ladder(const HyperbolicSystem& system,
                                       const std::vector<std::pair<PiecewiseConstantFn, PiecewiseConstantFn>>& corpus,
                                       const SuiteParams& params, double t, const FunctionalConstants& consts) {
  MonotonicityLadder out;
  out.epsilons = params.ft_epsilons;
  for (double eps : params.ft_epsilons) {
    double iu = 0.0, ip = 0.0;
    std::size_t events = 0;
    for (const auto& [u, w] : corpus) {
      const MonotonicityProbe m = probe_monotonicity(system, u, w, probe_tracking(eps, params.accurate_only), t, consts);
      iu = std::max(iu, m.upsilon_increment);
      ip = std::max(ip, m.phi_increment);
      events += m.events;
    }
    out.upsilon_increments.push_back(iu);
    out.phi_increments.push_back(ip);
    out.events.push_back(events);
  }
  const double eps0 = out.epsilons.front();
  out.k_upsilon = out.upsilon_increments.front() / eps0;
  out.k_phi = out.phi_increments.front() / eps0;
  for (std::size_t k = 0; k < out.epsilons.size(); ++k) {
    const double e = out.epsilons[k];
    out.upsilon_ok = out.upsilon_ok && out.upsilon_increments[k] <= (1.0 + params.stability) * out.k_upsilon * e + params.slack;
    out.phi_ok = out.phi_ok && out.phi_increments[k] <= (1.0 + params.stability) * out.k_phi * e + params.slack;
  }
  return out;
}

SizeEstimateReport size_estimates(const HyperbolicSystem& system, const LocalSource& g, std::mt19937_64& rng,
                                  int samples, const std::vector<double>& s_values, bool shocks) {
  const int n = system.dim();
  const double c = dissipativity_margin(system, g);
  const auto compose = [&](const StrengthVector& s, const State& u) {
    return shocks ? compose_shocks(system, s, u) : compose_psi(system, s, u);
  };
  const auto invert = [&](const State& a, const State& b) {
    return shocks ? invert_shocks(system, a, b) : solve_riemann(system, a, b);
  };
  struct Sample {
    State um;
    StrengthVector sigma;
    State a, b;
  };
  std::vector<Sample> corpus;
  for (int k = 0; k < samples; ++k)
    corpus.push_back({random_state(rng, n, 0.25 * system.omega_radius()), random_strengths(rng, n, 0.05),
                      random_state(rng, n, 1.0), random_state(rng, n, 1.0)});

  SizeEstimateReport rep;
  rep.samples = samples;
  rep.s_values = s_values;
  for (double s : s_values) {
    double k1 = 0.0, k2 = -std::numeric_limits<double>::infinity();
    for (const Sample& smp : corpus) {
      const State vm = compose(smp.sigma, smp.um);
      const double sm = smp.sigma.l1();
      const double gap = norm1(smp.b - smp.a);
      const StrengthVector plus = invert(smp.um + s * smp.a, vm + s * smp.b);
      const double denom = s * (sm + gap);
      if (denom > 0.0) k1 = std::max(k1, norm1(plus.values - smp.sigma.values) / denom);
      const StrengthVector bis = invert(smp.um + s * (smp.a + g(smp.um)), vm + s * (smp.b + g(vm)));
      if (gap > 0.0) k2 = std::max(k2, (bis.l1() - (1.0 - c / 2.0 * s) * sm) / (s * gap));
    }
    rep.k_size.push_back(k1);
    rep.k_size_bis.push_back(std::max(k2, 0.0));
  }
  return rep;
}

}  // namespace balaw
