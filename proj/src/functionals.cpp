#include "balaw/functionals.hpp"

#include "balaw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace balaw {

double WaveDecomposition::a_minus(int j, double x) const {
  const auto k = std::upper_bound(positions.begin(), positions.end(), x) - positions.begin();
  return prefix[j][static_cast<std::size_t>(k)];
}

double WaveDecomposition::a_plus(int j, double x) const { return total(j) - a_minus(j, x); }

WaveDecomposition make_decomposition(int n, std::vector<double> positions, std::vector<StrengthVector> strengths) {
  if (positions.size() != strengths.size()) throw InvalidArgument("one strength vector per position expected");
  WaveDecomposition dec;
  dec.n = n;
  dec.positions = std::move(positions);
  dec.strengths = std::move(strengths);
  dec.prefix.assign(n, std::vector<double>(dec.positions.size() + 1, 0.0));
  for (int j = 0; j < n; ++j)
    for (std::size_t k = 0; k < dec.positions.size(); ++k)
      dec.prefix[j][k + 1] = dec.prefix[j][k] + std::abs(dec.strengths[k][j]);
  return dec;
}

WaveDecomposition decompose(const HyperbolicSystem& system, const PiecewiseConstantFn& u, const CurveOptions& opts) {
  if (u.dim() != system.dim()) throw DimensionMismatch("profile and system dimensions differ");
  std::vector<StrengthVector> s;
  s.reserve(u.jumps());
  for (std::size_t k = 0; k < u.jumps(); ++k) s.push_back(solve_riemann(system, u.left(k), u.right(k), opts));
  return make_decomposition(system.dim(), u.breakpoints(), std::move(s));
}

double linear_functional(const WaveDecomposition& dec) {
  double v = 0.0;
  for (int j = 0; j < dec.n; ++j) v += dec.total(j);
  return v;
}

std::vector<std::pair<WaveRef, WaveRef>> approaching_pairs(const WaveDecomposition& dec,
                                                           const std::vector<FieldKind>& kinds) {
  std::vector<std::pair<WaveRef, WaveRef>> out;
  for (std::size_t x = 0; x < dec.size(); ++x)
    for (std::size_t y = x + 1; y < dec.size(); ++y)
      for (int i = 0; i < dec.n; ++i) {
        const double sx = dec.strengths[x][i];
        if (sx == 0.0) continue;
        for (int j = 0; j < dec.n; ++j) {
          const double sy = dec.strengths[y][j];
          if (sy == 0.0) continue;
          const bool approaching =
              i > j || (i == j && kinds[i] == FieldKind::GenuinelyNonlinear && std::min(sx, sy) < 0.0);
          if (approaching) out.push_back({{x, i}, {y, j}});
        }
      }
  return out;
}

double interaction_potential(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds) {
  const int n = dec.n;
  std::vector<double> left_abs(n, 0.0), left_pos(n, 0.0);
  double q = 0.0;
  for (std::size_t y = 0; y < dec.size(); ++y) {
    const StrengthVector& s = dec.strengths[y];
    for (int j = 0; j < n; ++j) {
      const double a = std::abs(s[j]);
      if (a == 0.0) continue;
      for (int i = j + 1; i < n; ++i) q += a * left_abs[i];
      if (kinds[j] == FieldKind::GenuinelyNonlinear) {
        // every earlier j-wave approaches unless both are rarefactions
        q += a * left_abs[j];
        if (s[j] > 0.0) q -= s[j] * left_pos[j];
      }
    }
    for (int j = 0; j < n; ++j) {
      left_abs[j] += std::abs(s[j]);
      if (s[j] > 0.0) left_pos[j] += s[j];
    }
  }
  return q;
}

double upsilon(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds, const FunctionalConstants& consts) {
  return linear_functional(dec) + consts.C0 * interaction_potential(dec, kinds);
}

double weight_sum(const WaveDecomposition& dec, const std::vector<FieldKind>& kinds, int i, double q, double x) {
  double a = 0.0;
  for (int j = 0; j < i; ++j) a += dec.a_plus(j, x);
  for (int j = i + 1; j < dec.n; ++j) a += dec.a_minus(j, x);
  if (kinds[i] == FieldKind::GenuinelyNonlinear) a += q >= 0.0 ? dec.a_plus(i, x) : dec.a_minus(i, x);
  return a;
}

double liu_yang_weight(const WaveDecomposition& dec_v, const WaveDecomposition& dec_vt,
                       const std::vector<FieldKind>& kinds, const FunctionalConstants& consts, int i, double q,
                       double x, double interaction_v, double interaction_vt) {
  return 1.0 + consts.kappa1 * weight_sum(dec_v, kinds, i, q, x) + consts.kappa1 * weight_sum(dec_vt, kinds, i, -q, x) +
         consts.kappa1 * consts.kappa2 * (interaction_v + interaction_vt);
}

double stability_functional(const HyperbolicSystem& system, const PiecewiseConstantFn& v,
                            const PiecewiseConstantFn& vt, const FunctionalConstants& consts,
                            const CurveOptions& opts) {
  if (v.dim() != system.dim() || vt.dim() != system.dim()) throw DimensionMismatch("profile and system dimensions differ");
  const std::vector<FieldKind>& kinds = system.field_kinds();
  const WaveDecomposition dv = decompose(system, v, opts);
  const WaveDecomposition dvt = decompose(system, vt, opts);
  const double qv = interaction_potential(dv, kinds);
  const double qvt = interaction_potential(dvt, kinds);
  const std::vector<double> cuts = merged_breakpoints(v, vt);
  double phi = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k - 1] + cuts[k]);
    const State a = v(mid), b = vt(mid);
    if (a == b) continue;
    const StrengthVector q = invert_shocks(system, a, b, opts);
    double local = 0.0;
    for (int i = 0; i < system.dim(); ++i) {
      if (q[i] == 0.0) continue;
      local += std::abs(q[i]) * liu_yang_weight(dv, dvt, kinds, consts, i, q[i], mid, qv, qvt);
    }
    phi += local * (cuts[k] - cuts[k - 1]);
  }
  return phi;
}

FunctionalReport functional_report(const HyperbolicSystem& system, const PiecewiseConstantFn& u,
                                   const FunctionalConstants& consts, double t) {
  const WaveDecomposition dec = decompose(system, u);
  FunctionalReport r;
  r.t = t;
  r.V = linear_functional(dec);
  r.interaction = interaction_potential(dec, system.field_kinds());
  r.upsilon = r.V + consts.C0 * r.interaction;
  return r;
}

}  // namespace balaw
