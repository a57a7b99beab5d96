#pragma once

#include "balaw/functionals.hpp"
#include "balaw/hyperbolic_system.hpp"
#include "balaw/piecewise_fn.hpp"
#include "balaw/wave_curves.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace balaw {

/// Family index carried by non-physical fronts.
inline constexpr int kNonPhysical = -1;

enum class FrontKind { Shock, Contact, Rarefaction, NonPhysical };

struct Front {
  /// Position at time t_ref; the front moves with constant speed.
  double position = 0.0;
  double t_ref = 0.0;
  /// 0-based family, or kNonPhysical.
  int family = kNonPhysical;
  /// Signed wave strength; for non-physical fronts the l1 size of the jump.
  double strength = 0.0;
  double speed = 0.0;
  FrontKind kind = FrontKind::Contact;
  /// Number of interactions in the history of this front.
  int generation = 0;

  double position_at(double t) const { return position + speed * (t - t_ref); }
};

struct FrontTrackingOptions {
  double epsilon = 1e-2;
  /// Accurate solver used when |sigma sigma'| >= threshold; negative means epsilon^2.
  double interaction_threshold = -1.0;
  /// Wave components below this size are absorbed into a neighbouring front.
  double strength_floor = 1e-14;
  /// Riemann components below relative_floor * |sigma|_1 are round-off of the curve
  /// solvers and are absorbed as well.
  double relative_floor = 1e-10;
  std::size_t max_fronts = 20000;
  std::size_t max_events = 2000000;
  /// Position shift used to break ternary collisions.
  double tie_shift = 1e-12;
  CurveOptions curves{};

  double threshold() const { return interaction_threshold < 0.0 ? epsilon * epsilon : interaction_threshold; }
};

/// One resolved collision.
struct CollisionEvent {
  double time = 0.0;
  double position = 0.0;
  Front left;
  Front right;
  std::vector<Front> outgoing;
  bool accurate = true;
};

/// Epsilon-approximate front-tracking solution of the homogeneous system.
class FrontState {
 public:
  FrontState(HyperbolicSystem system, FrontTrackingOptions options);

  const HyperbolicSystem& system() const { return system_; }
  const FrontTrackingOptions& options() const { return options_; }
  double time() const { return time_; }
  const std::vector<Front>& fronts() const { return fronts_; }
  /// states()[k] lies between fronts k-1 and k; states().size() == fronts().size() + 1.
  const std::vector<State>& states() const { return states_; }
  std::size_t events() const { return events_; }
  std::size_t accurate_events() const { return accurate_events_; }
  /// Speed assigned to non-physical fronts, above every characteristic speed on the domain.
  double lambda_hat() const { return lambda_hat_; }
  /// Sum of the strengths of non-physical fronts.
  double nonphysical_total() const;
  std::size_t max_fronts_seen() const { return max_fronts_seen_; }

  /// Strengths at every front: physical fronts carry their own strength, non-physical fronts
  /// are decomposed by the Riemann solver. Coinciding fronts are merged into one site.
  WaveDecomposition decomposition() const;

  using EventHook = std::function<void(const CollisionEvent&, const FrontState&)>;

  /// Replaces the current fronts by the solution of every Riemann problem of u0.
  void initialize(const PiecewiseConstantFn& u0);
  void evolve(double t_target, const EventHook& hook = {});
  PiecewiseConstantFn sample() const;

 private:
  struct Emission {
    std::vector<Front> fronts;
    std::vector<State> states;  // right state of each emitted front
  };

  Emission solve_accurate(const State& ul, const State& ur, double x, double t, int keep_whole_family,
                          int generation) const;
  Emission solve_simplified(const State& ul, const State& ur, const Front& a, const Front& b, double x, double t,
                            int generation) const;
  void append_wave(Emission& out, int family, double strength, const State& from, double x, double t,
                   int generation, bool split) const;
  void finish_emission(Emission& out, const State& ul, const State& ur, double x, double t, int generation) const;
  void resolve(std::size_t k, double t, const EventHook& hook);
  void move_to(double t);
  std::vector<std::pair<std::size_t, std::size_t>> sites() const;

  HyperbolicSystem system_;
  FrontTrackingOptions options_;
  double time_ = 0.0;
  double lambda_hat_ = 0.0;
  std::vector<Front> fronts_;
  std::vector<State> states_;
  std::size_t events_ = 0;
  std::size_t accurate_events_ = 0;
  std::size_t max_fronts_seen_ = 0;
};

/// Solves every Riemann problem of u0 accurately; rarefactions become fans of fronts of
/// strength at most epsilon. With upsilon_bound = (delta, constants), throws DomainTooLarge
/// unless Upsilon(u0) < delta.
FrontState init_front_tracking(const HyperbolicSystem& system, const PiecewiseConstantFn& u0,
                               const FrontTrackingOptions& options,
                               std::optional<std::pair<double, FunctionalConstants>> upsilon_bound = std::nullopt);

/// Advances to t_target, resolving collisions in time order. The hook sees every event.
void evolve(FrontState& state, double t_target, const FrontState::EventHook& hook = {});

/// Profile at the current time.
PiecewiseConstantFn sample(const FrontState& state);

}  // namespace balaw
