#pragma once

#include "balaw/front_tracking.hpp"
#include "balaw/functionals.hpp"
#include "balaw/source_operator.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace balaw {

/// Homogeneous solver settings for splitting runs. Every step re-solves all jumps, so
/// non-physical fronts would be turned back into physical waves anyway: all interactions
/// use the accurate solver, and the waves of order 1e-8 created by the source at every
/// jump are pruned instead of accumulating.
FrontTrackingOptions splitting_tracking_defaults();

struct SplittingOptions {
  /// Front-tracking accuracy; non-positive means "equal to the splitting step".
  double ft_epsilon = 0.0;
  /// Pi_N resolution; negative selects ceil(4 / ft_epsilon) capped at max_cells, 0 the
  /// sampled exact convolution. Ignored for a zero kernel.
  int n_cells = -1;
  int max_cells = 512;
  int extra_cells = 4;
  /// Template for the homogeneous solver; its epsilon is overwritten by ft_epsilon.
  FrontTrackingOptions tracking = splitting_tracking_defaults();
  FunctionalConstants constants{};
  /// Record V, Q, Upsilon and the L1 norm at every step.
  bool record_functionals = true;
  /// Keep a profile snapshot every this many steps (0: final profile only).
  int snapshot_every = 0;
  /// Phi against this profile is added to the trace when set.
  std::optional<PiecewiseConstantFn> reference;
};

struct TracePoint {
  double t = 0.0;
  FunctionalReport report;
  double l1 = 0.0;
  std::size_t jumps = 0;
  std::size_t fronts = 0;
};

/// Euler polygonal F^eps(t) u0 with its diagnostics.
struct PolygonalRun {
  double epsilon = 0.0;
  double ft_epsilon = 0.0;
  int n_cells = 0;
  double t_final = 0.0;
  std::vector<TracePoint> trace;
  std::vector<std::pair<double, PiecewiseConstantFn>> snapshots;
  PiecewiseConstantFn final_profile;
  std::size_t max_fronts = 0;
  std::size_t events = 0;
};

double effective_ft_epsilon(double epsilon, const SplittingOptions& opts);
/// Pi_N resolution actually used; grown if needed so the window covers [-reach, reach].
int effective_cells(const SourceSpec& spec, double ft_epsilon, double reach, const SplittingOptions& opts);

/// S_s u by front tracking at accuracy ft_epsilon.
PiecewiseConstantFn homogeneous_flow(const HyperbolicSystem& system, double s, const PiecewiseConstantFn& u,
                                     double ft_epsilon, const FrontTrackingOptions& tracking = splitting_tracking_defaults());

/// F(s) u = F^(s) S_s u.
PiecewiseConstantFn local_flow(const SourceSpec& spec, double s, const PiecewiseConstantFn& u, double ft_epsilon,
                               int n_cells, const SplittingOptions& opts = {});

/// floor(t / eps) full steps followed by the remainder step.
PolygonalRun euler_polygonal(const SourceSpec& spec, const PiecewiseConstantFn& u0, double t, double epsilon,
                             const SplittingOptions& opts = {});

struct ConvergenceRow {
  double epsilon = 0.0;
  /// L1 distance to the previous (coarser) rung; NaN on the first row.
  double distance = 0.0;
  double ratio = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<PolygonalRun> runs;
  /// Finest polygonal, the stand-in for P_t u.
  PiecewiseConstantFn profile;
  /// Last Cauchy distance, used as the error bar of the profile.
  double error_estimate = 0.0;
  /// Distances failed to decrease somewhere along the ladder.
  bool non_cauchy = false;
};

ConvergenceTable converge_semigroup(const SourceSpec& spec, const PiecewiseConstantFn& u0, double t,
                                    const std::vector<double>& epsilon_ladder, const SplittingOptions& opts = {});

struct TangencyRow {
  double t = 0.0;
  /// ||P_t u - (S_t u + t G(u))||_L1 / t
  double defect = 0.0;
};

/// P_t is the polygonal with step t / substeps.
std::vector<TangencyRow> tangency_defect(const SourceSpec& spec, const PiecewiseConstantFn& u,
                                         const std::vector<double>& t_ladder, int substeps = 8,
                                         const SplittingOptions& opts = {});

/// Least-squares fit log y = log a + p log x.
struct PowerFit {
  double coefficient = 0.0;
  double exponent = 0.0;
};
PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares fit log y = log a - rate * x.
struct RateFit {
  double amplitude = 0.0;
  double rate = 0.0;
};
RateFit fit_exponential_decay(const std::vector<double>& x, const std::vector<double>& y);

struct DependenceRow {
  double eta = 0.0;
  double distance = 0.0;
};

struct DependenceSweep {
  std::vector<DependenceRow> rows;
  PowerFit fit;
  /// distance / (eta t) on every row
  std::vector<double> coefficients;
};

/// ||P_t u - P~_t u||_L1 for the perturbed configurations perturb(eta), P approximated by
/// polygonals with step epsilon on both sides.
DependenceSweep dependence_sweep(const SourceSpec& spec, const std::function<SourceSpec(double)>& perturb,
                                 const PiecewiseConstantFn& u0, double t, const std::vector<double>& etas,
                                 double epsilon, const SplittingOptions& opts = {});

}  // namespace balaw
