#include "balaw/front_tracking.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace balaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_position(double a, double b) { return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a)); }

}  // namespace

FrontState::FrontState(HyperbolicSystem system, FrontTrackingOptions options)
    : system_(std::move(system)), options_(std::move(options)) {
  if (!(options_.epsilon > 0.0)) throw InvalidArgument("front tracking needs epsilon > 0");
  lambda_hat_ = system_.max_speed() + 1.0;
  states_.push_back(State::Zero(system_.dim()));
}

double FrontState::nonphysical_total() const {
  double s = 0.0;
  for (const Front& f : fronts_)
    if (f.family == kNonPhysical) s += f.strength;
  return s;
}

void FrontState::append_wave(Emission& out, int family, double strength, const State& from, double x, double t,
                             int generation, bool split) const {
  const bool gnl = system_.genuinely_nonlinear(family);
  if (gnl && strength > 0.0) {
    const int pieces = split ? std::max(1, static_cast<int>(std::ceil(strength / options_.epsilon - 1e-12))) : 1;
    const double step = strength / pieces;
    State cur = from;
    for (int p = 0; p < pieces; ++p) {
      State next = rarefaction_curve(system_, family, step, cur, options_.curves);
      Front f;
      f.position = x;
      f.t_ref = t;
      f.family = family;
      f.strength = step;
      f.speed = jump_speed(system_, family, cur, next);
      f.kind = FrontKind::Rarefaction;
      f.generation = generation;
      out.fronts.push_back(f);
      out.states.push_back(next);
      cur = std::move(next);
    }
    return;
  }
  Front f;
  f.position = x;
  f.t_ref = t;
  f.family = family;
  f.strength = strength;
  f.generation = generation;
  if (gnl) {
    const ShockPoint p = shock_curve(system_, family, strength, from, options_.curves);
    f.kind = FrontKind::Shock;
    f.speed = p.speed;
    out.states.push_back(p.state);
  } else {
    State next = rarefaction_curve(system_, family, strength, from, options_.curves);
    f.kind = FrontKind::Contact;
    f.speed = jump_speed(system_, family, from, next);
    out.states.push_back(std::move(next));
  }
  out.fronts.push_back(f);
}

// The last emitted state is pinned to ur so the profile stays exactly consistent; the
// mismatch left by the Newton tolerance or by dropped components is absorbed there.
void FrontState::finish_emission(Emission& out, const State& ul, const State& ur, double x, double t,
                                 int generation) const {
  if (out.fronts.empty()) {
    if (ul == ur) return;
    // every component fell below the floor: keep one front carrying the whole jump
    const StrengthVector s = solve_riemann(system_, ul, ur, options_.curves);
    int best = 0;
    for (int j = 1; j < s.size(); ++j)
      if (std::abs(s[j]) > std::abs(s[best])) best = j;
    Front f;
    f.position = x;
    f.t_ref = t;
    f.family = best;
    f.strength = s[best];
    f.speed = jump_speed(system_, best, ul, ur);
    f.kind = !system_.genuinely_nonlinear(best) ? FrontKind::Contact
             : s[best] < 0.0                    ? FrontKind::Shock
                                                : FrontKind::Rarefaction;
    f.generation = generation;
    out.fronts.push_back(f);
    out.states.push_back(ur);
    return;
  }
  out.states.back() = ur;
}

FrontState::Emission FrontState::solve_accurate(const State& ul, const State& ur, double x, double t,
                                                int keep_whole_family, int generation) const {
  Emission out;
  if (ul == ur) return out;
  const StrengthVector sigma = solve_riemann(system_, ul, ur, options_.curves);
  const double floor = options_.strength_floor + options_.relative_floor * sigma.l1();
  State cur = ul;
  for (int j = 0; j < system_.dim(); ++j) {
    if (std::abs(sigma[j]) < floor) continue;
    append_wave(out, j, sigma[j], cur, x, t, generation, j != keep_whole_family);
    cur = out.states.back();
  }
  finish_emission(out, ul, ur, x, t, generation);
  return out;
}

FrontState::Emission FrontState::solve_simplified(const State& ul, const State& ur, const Front& a, const Front& b,
                                                  double x, double t, int generation) const {
  Emission out;
  State cur = ul;
  const auto physical = [&](int family, double strength) {
    if (std::abs(strength) < options_.strength_floor) return;
    append_wave(out, family, strength, cur, x, t, generation, false);
    cur = out.states.back();
  };
  if (a.family == kNonPhysical || b.family == kNonPhysical) {
    const Front& p = a.family == kNonPhysical ? b : a;
    physical(p.family, p.strength);
  } else if (a.family > b.family) {
    physical(b.family, b.strength);
    physical(a.family, a.strength);
  } else {
    physical(a.family, a.strength + b.strength);
  }
  const double gap = norm1(ur - cur);
  if (gap >= options_.strength_floor) {
    Front np;
    np.position = x;
    np.t_ref = t;
    np.family = kNonPhysical;
    np.strength = gap;
    np.speed = lambda_hat_;
    np.kind = FrontKind::NonPhysical;
    np.generation = generation;
    out.fronts.push_back(np);
    out.states.push_back(ur);
  } else {
    finish_emission(out, ul, ur, x, t, generation);
  }
  return out;
}

void FrontState::initialize(const PiecewiseConstantFn& u0) {
  if (u0.dim() != system_.dim()) throw DimensionMismatch("datum and system dimensions differ");
  fronts_.clear();
  states_.assign(1, State::Zero(system_.dim()));
  events_ = accurate_events_ = 0;
  try {
    for (std::size_t k = 0; k < u0.jumps(); ++k) {
      Emission e = solve_accurate(u0.left(k), u0.right(k), u0.breakpoints()[k], time_, -1, 0);
      for (std::size_t m = 0; m < e.fronts.size(); ++m) {
        fronts_.push_back(e.fronts[m]);
        states_.push_back(std::move(e.states[m]));
      }
    }
  } catch (const LeftDomain& err) {
    throw DomainExit(std::string("front tracking initialization: ") + err.what());
  }
  if (fronts_.size() > options_.max_fronts)
    throw BlowupGuard("front count " + std::to_string(fronts_.size()) + " exceeds the limit");
  max_fronts_seen_ = std::max(max_fronts_seen_, fronts_.size());
}

void FrontState::move_to(double t) {
  for (Front& f : fronts_) {
    f.position = f.position_at(t);
    f.t_ref = t;
  }
  // round-off must not reorder fronts
  for (std::size_t k = 1; k < fronts_.size(); ++k)
    if (fronts_[k].position < fronts_[k - 1].position) fronts_[k].position = fronts_[k - 1].position;
  time_ = t;
}

void FrontState::resolve(std::size_t k, double t, const EventHook& hook) {
  Front a = fronts_[k];
  Front b = fronts_[k + 1];
  const double x = 0.5 * (a.position_at(t) + b.position_at(t));

  // a third front at the same point is pushed aside
  if (k + 2 < fronts_.size() && same_position(fronts_[k + 2].position_at(t), x)) {
    Front& c = fronts_[k + 2];
    c.position = c.position_at(t) + options_.tie_shift;
    c.t_ref = t;
  }
  if (k > 0 && same_position(fronts_[k - 1].position_at(t), x)) {
    Front& c = fronts_[k - 1];
    c.position = c.position_at(t) - options_.tie_shift;
    c.t_ref = t;
  }

  const State& ul = states_[k];
  const State& ur = states_[k + 2];
  const int generation = std::max(a.generation, b.generation) + 1;
  const bool physical = a.family != kNonPhysical && b.family != kNonPhysical;
  const bool accurate =
      physical && (std::abs(a.strength * b.strength) >= options_.threshold() || a.family < b.family);
  Emission e;
  try {
    if (accurate) {
      int keep = -1;
      if (a.kind == FrontKind::Rarefaction) keep = a.family;
      if (b.kind == FrontKind::Rarefaction) keep = b.family;
      e = solve_accurate(ul, ur, x, t, keep, generation);
    } else {
      e = solve_simplified(ul, ur, a, b, x, t, generation);
    }
  } catch (const LeftDomain& err) {
    throw DomainExit(std::string("front tracking interaction: ") + err.what());
  }

  ++events_;
  if (accurate) ++accurate_events_;

  fronts_.erase(fronts_.begin() + static_cast<long>(k), fronts_.begin() + static_cast<long>(k) + 2);
  states_.erase(states_.begin() + static_cast<long>(k) + 1);
  fronts_.insert(fronts_.begin() + static_cast<long>(k), e.fronts.begin(), e.fronts.end());
  // the emitted right states replace the vanished middle state; the last equals ur
  if (!e.states.empty()) {
    states_.insert(states_.begin() + static_cast<long>(k) + 1, e.states.begin(), e.states.end() - 1);
  }
  if (fronts_.size() > options_.max_fronts)
    throw BlowupGuard("front count " + std::to_string(fronts_.size()) + " exceeds the limit");
  max_fronts_seen_ = std::max(max_fronts_seen_, fronts_.size());

  if (hook) {
    CollisionEvent ev;
    ev.time = t;
    ev.position = x;
    ev.left = a;
    ev.right = b;
    ev.outgoing = std::move(e.fronts);
    ev.accurate = accurate;
    hook(ev, *this);
  }
}

void FrontState::evolve(double t_target, const EventHook& hook) {
  if (t_target < time_) throw InvalidArgument("cannot evolve backwards in time");
  std::size_t guard = 0;
  while (true) {
    double best = kInf;
    double best_x = kInf;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k + 1 < fronts_.size(); ++k) {
      const Front& a = fronts_[k];
      const Front& b = fronts_[k + 1];
      const double closing = a.speed - b.speed;
      if (!(closing > 0.0)) continue;
      const double gap = b.position_at(time_) - a.position_at(time_);
      const double t = time_ + std::max(0.0, gap) / closing;
      if (t < best || (t == best && a.position_at(t) < best_x)) {
        best = t;
        best_k = k;
        best_x = a.position_at(t);
      }
    }
    if (!(best <= t_target)) break;
    if (++guard > options_.max_events) throw BlowupGuard("event count exceeds the limit");
    resolve(best_k, best, hook);
    time_ = best;
  }
  move_to(t_target);
}

std::vector<std::pair<std::size_t, std::size_t>> FrontState::sites() const {
  // groups [first, last] of fronts sharing one position at the current time
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k < fronts_.size(); ++k) {
    const double x = fronts_[k].position_at(time_);
    if (!out.empty() && same_position(fronts_[out.back().first].position_at(time_), x))
      out.back().second = k;
    else
      out.push_back({k, k});
  }
  return out;
}

PiecewiseConstantFn FrontState::sample() const {
  std::vector<double> x;
  std::vector<State> v{states_.front()};
  for (const auto& [first, last] : sites()) {
    const double pos = fronts_[first].position_at(time_);
    if (!x.empty() && !(pos > x.back())) {
      v.back() = states_[last + 1];
      continue;
    }
    x.push_back(pos);
    v.push_back(states_[last + 1]);
  }
  return PiecewiseConstantFn(std::move(x), std::move(v));
}

WaveDecomposition FrontState::decomposition() const {
  std::vector<double> pos;
  std::vector<StrengthVector> strengths;
  for (const auto& [first, last] : sites()) {
    const Front& f = fronts_[first];
    StrengthVector s = StrengthVector::zero(system_.dim());
    if (first == last && f.family != kNonPhysical) {
      s[f.family] = f.strength;
    } else {
      s = solve_riemann(system_, states_[first], states_[last + 1], options_.curves);
    }
    pos.push_back(f.position_at(time_));
    strengths.push_back(std::move(s));
  }
  return make_decomposition(system_.dim(), std::move(pos), std::move(strengths));
}

FrontState init_front_tracking(const HyperbolicSystem& system, const PiecewiseConstantFn& u0,
                               const FrontTrackingOptions& options,
                               std::optional<std::pair<double, FunctionalConstants>> upsilon_bound) {
  if (upsilon_bound) {
    const double ups = upsilon(decompose(system, u0), system.field_kinds(), upsilon_bound->second);
    if (!(ups < upsilon_bound->first))
      throw DomainTooLarge("initial datum has Upsilon " + std::to_string(ups) + " >= delta");
  }
  FrontState state(system, options);
  state.initialize(u0);
  return state;
}

void evolve(FrontState& state, double t_target, const FrontState::EventHook& hook) { state.evolve(t_target, hook); }

PiecewiseConstantFn sample(const FrontState& state) { return state.sample(); }

}  // namespace balaw
