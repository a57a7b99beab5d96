#include "balaw/errors.hpp"
#include "balaw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace balaw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(where + ": '" + text + "' is not a number");
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"name", "suites", "seed", "output"}},
      {"system", {"presets"}},
      {"source", {"local", "kernel", "s_max"}},
      {"datum", {"kind", "steps", "random_jumps", "fill"}},
      {"ladder", {"epsilon", "t_final"}},
      {"constants", {"mode", "C0", "kappa1", "kappa2", "delta"}},
      {"suite",
       {"samples", "pairs", "s_values", "ft_epsilons", "t_values", "etas", "perturbations", "substeps", "n_cells",
        "stability", "max_equivalence", "min_order", "slack", "accurate_only"}},
      {"calibration", {"samples", "max_rounds", "factor", "t_final"}},
  };
  return keys;
}

/// "Name(a, b)" -> {"Name", {"a", "b"}}
std::pair<std::string, std::vector<std::string>> call_syntax(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw ConfigError("malformed source term '" + text + "'");
  std::vector<std::string> args;
  const std::string inner = trim(t.substr(open + 1, t.size() - open - 2));
  if (!inner.empty()) args = split(inner, ',');
  return {trim(t.substr(0, open)), args};
}

void require_args(const std::string& name, const std::vector<std::string>& args, std::size_t count) {
  if (args.size() != count)
    throw ConfigError(name + " expects " + std::to_string(count) + " argument(s), got " + std::to_string(args.size()));
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

void require_decreasing(const std::vector<double>& v, const std::string& what) {
  if (v.empty()) throw ConfigError(what + " must not be empty");
  for (double x : v) require_positive(x, what);
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) throw ConfigError(what + " must decrease strictly");
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(where + ": empty section name");
      for (const Section& s : cfg.sections_)
        if (s.name == name) throw ConfigError(where + ": duplicate section [" + name + "]");
      cfg.sections_.push_back({name, {}});
      current = &cfg.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (!current) throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (const Entry& e : current->entries)
      if (e.key == key) throw ConfigError(where + ": duplicate key '" + key + "'");
    current->entries.push_back({key, value});
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  for (const Section& s : sections_)
    if (s.name == section)
      for (const Entry& e : s.entries)
        if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const std::string& Config::get(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing key [" + section + "] " + key);
  return e->value;
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  return e ? to_number(e->value, "[" + section + "] " + key) : fallback;
}

long Config::integer(const std::string& section, const std::string& key, long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const double v = to_number(e->value, "[" + section + "] " + key);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError("[" + section + "] " + key + " must be an integer");
  return static_cast<long>(v);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const std::string& item : split(e->value, ','))
    out.push_back(to_number(item, "[" + section + "] " + key));
  return out;
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<std::string> out;
  for (const std::string& item : split(e->value, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  for (Section& s : sections_)
    if (s.name == section) {
      for (Entry& e : s.entries)
        if (e.key == key) {
          e.value = value;
          return;
        }
      s.entries.push_back({key, value});
      return;
    }
  sections_.push_back({section, {{key, value}}});
}

LocalSource make_local_source(const std::string& text, int n) {
  const auto [name, args] = call_syntax(text);
  if (name == "Zero") {
    require_args(name, args, 0);
    return LocalSource::zero(n);
  }
  if (name == "LinearDamping") {
    require_args(name, args, 1);
    return LocalSource::linear_damping(n, to_number(args[0], name));
  }
  if (name == "ShearDamping") {
    require_args(name, args, 2);
    return LocalSource::shear_damping(n, to_number(args[0], name), to_number(args[1], name));
  }
  throw ConfigError("unknown local source '" + text + "'");
}

ConvolutionKernel make_kernel(const std::string& text, int n, double c) {
  const auto [name, args] = call_syntax(text);
  if (name == "Zero") {
    require_args(name, args, 0);
    return ConvolutionKernel::zero(n);
  }
  if (name != "Box" && name != "Exp") throw ConfigError("unknown kernel '" + text + "'");
  require_args(name, args, 2);
  // just inside the 0.05 c cap so that rounding cannot push it over
  const double alpha = args[0] == "cap" ? 0.05 * c * (1.0 - 1e-12) : to_number(args[0], name);
  const double width = to_number(args[1], name);
  if (alpha < 0.0) throw ConfigError("kernel mass must be non-negative");
  require_positive(width, name + " width");
  return name == "Box" ? ConvolutionKernel::box(n, alpha, width) : ConvolutionKernel::exponential(n, alpha, width);
}

SourceSpec make_source(const ExperimentConfig& cfg, const std::string& preset_name) {
  const HyperbolicSystem sys = preset(preset_name);
  LocalSource g = make_local_source(cfg.local, sys.dim());
  const SourceSpec bare(sys, g, ConvolutionKernel::zero(sys.dim()), cfg.s_max);
  return bare.with_kernel(make_kernel(cfg.kernel, sys.dim(), bare.c_certified()));
}

ExperimentConfig parse_experiment(const Config& raw) {
  for (const Config::Section& s : raw.sections()) {
    const auto it = schema().find(s.name);
    if (it == schema().end()) throw ConfigError("unknown section [" + s.name + "]");
    for (const Config::Entry& e : s.entries)
      if (!it->second.count(e.key)) throw ConfigError("unknown key '" + e.key + "' in [" + s.name + "]");
  }

  ExperimentConfig cfg;
  cfg.raw = raw;
  cfg.name = raw.get_or("run", "name", cfg.name);
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("run name must be a plain, non-empty file name");
  cfg.suites = raw.words("run", "suites", {});
  if (cfg.suites.empty()) throw ConfigError("[run] suites must list at least one suite");
  for (const std::string& s : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError("unknown suite '" + s + "'");
  const long seed = raw.integer("run", "seed", 1);
  if (seed < 0) throw ConfigError("seed must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.output = raw.get_or("run", "output", cfg.output);

  cfg.presets = raw.words("system", "presets", cfg.presets);
  if (cfg.presets.empty()) throw ConfigError("[system] presets must not be empty");
  const std::vector<std::string> known = preset_names();
  for (const std::string& p : cfg.presets)
    if (std::find(known.begin(), known.end(), p) == known.end()) throw ConfigError("unknown preset '" + p + "'");

  cfg.local = raw.get_or("source", "local", cfg.local);
  cfg.kernel = raw.get_or("source", "kernel", cfg.kernel);
  cfg.s_max = raw.number("source", "s_max", cfg.s_max);
  require_positive(cfg.s_max, "s_max");

  const std::string kind = raw.get_or("datum", "kind", raw.has("datum", "steps") ? "steps" : "random");
  cfg.datum.random_jumps = static_cast<int>(raw.integer("datum", "random_jumps", cfg.datum.random_jumps));
  cfg.datum.fill = raw.number("datum", "fill", cfg.datum.fill);
  if (cfg.datum.random_jumps < 2 || cfg.datum.random_jumps > 50) throw ConfigError("random_jumps must be in [2, 50]");
  if (!(cfg.datum.fill > 0.0 && cfg.datum.fill < 1.0)) throw ConfigError("fill must be in (0, 1)");
  if (kind == "steps") {
    for (const std::string& step : split(raw.get("datum", "steps"), ';')) {
      if (step.empty()) continue;
      const auto colon = step.find(':');
      if (colon == std::string::npos) throw ConfigError("datum step '" + step + "' needs 'x: values'");
      const double x = to_number(trim(step.substr(0, colon)), "datum position");
      std::vector<double> values;
      std::istringstream vs(step.substr(colon + 1));
      std::string tok;
      while (vs >> tok) values.push_back(to_number(tok, "datum value"));
      cfg.datum.steps.emplace_back(x, values);
    }
    if (cfg.datum.steps.empty()) throw ConfigError("datum steps are empty; use kind = zero");
    for (std::size_t k = 1; k < cfg.datum.steps.size(); ++k)
      if (!(cfg.datum.steps[k].first > cfg.datum.steps[k - 1].first))
        throw ConfigError("datum positions must increase strictly");
    for (double v : cfg.datum.steps.back().second)
      if (v != 0.0) throw ConfigError("the last datum value must be zero (compact support)");
  } else if (kind != "random" && kind != "zero") {
    throw ConfigError("datum kind must be random, steps or zero");
  }
  cfg.datum.random_jumps = kind == "zero" ? 0 : cfg.datum.random_jumps;

  cfg.epsilon_ladder = raw.numbers("ladder", "epsilon", cfg.epsilon_ladder);
  require_decreasing(cfg.epsilon_ladder, "epsilon ladder");
  if (cfg.epsilon_ladder.front() > cfg.s_max * (1.0 + 1e-12)) throw ConfigError("epsilon ladder exceeds s_max");
  cfg.t_final = raw.number("ladder", "t_final", cfg.t_final);
  if (!(cfg.t_final > 0.0 && cfg.t_final <= 10.0)) throw ConfigError("t_final must be in (0, 10]");

  const std::string mode = raw.get_or("constants", "mode", "fixed");
  if (mode != "fixed" && mode != "calibrate") throw ConfigError("constants mode must be fixed or calibrate");
  cfg.calibrate = mode == "calibrate";
  cfg.constants.C0 = raw.number("constants", "C0", cfg.constants.C0);
  cfg.constants.kappa1 = raw.number("constants", "kappa1", cfg.constants.kappa1);
  cfg.constants.kappa2 = raw.number("constants", "kappa2", cfg.constants.kappa2);
  cfg.constants.delta = raw.number("constants", "delta", cfg.constants.delta);
  require_positive(cfg.constants.C0, "C0");
  require_positive(cfg.constants.kappa1, "kappa1");
  require_positive(cfg.constants.kappa2, "kappa2");
  require_positive(cfg.constants.delta, "delta");

  SuiteParams& p = cfg.params;
  p.samples = static_cast<int>(raw.integer("suite", "samples", p.samples));
  p.pairs = static_cast<int>(raw.integer("suite", "pairs", p.pairs));
  if (p.samples < 1 || p.pairs < 1) throw ConfigError("samples and pairs must be positive");
  p.s_values = raw.numbers("suite", "s_values", p.s_values);
  require_decreasing(p.s_values, "s_values");
  if (p.s_values.front() > cfg.s_max * (1.0 + 1e-12)) throw ConfigError("s_values exceed s_max");
  p.ft_epsilons = raw.numbers("suite", "ft_epsilons", p.ft_epsilons);
  require_decreasing(p.ft_epsilons, "ft_epsilons");
  p.t_values = raw.numbers("suite", "t_values", p.t_values);
  require_decreasing(p.t_values, "t_values");
  p.etas = raw.numbers("suite", "etas", p.etas);
  require_decreasing(p.etas, "etas");
  p.perturbations = raw.words("suite", "perturbations", p.perturbations);
  for (const std::string& w : p.perturbations)
    if (w != "kernel" && w != "local" && w != "flux") throw ConfigError("unknown perturbation '" + w + "'");
  p.substeps = static_cast<int>(raw.integer("suite", "substeps", p.substeps));
  if (p.substeps < 1) throw ConfigError("substeps must be positive");
  p.n_cells = static_cast<int>(raw.integer("suite", "n_cells", p.n_cells));
  p.stability = raw.number("suite", "stability", p.stability);
  p.max_equivalence = raw.number("suite", "max_equivalence", p.max_equivalence);
  p.min_order = raw.number("suite", "min_order", p.min_order);
  p.slack = raw.number("suite", "slack", p.slack);
  if (p.slack < 0.0) throw ConfigError("slack must be non-negative");
  const std::string accurate = raw.get_or("suite", "accurate_only", p.accurate_only ? "true" : "false");
  if (accurate != "true" && accurate != "false") throw ConfigError("accurate_only must be true or false");
  p.accurate_only = accurate == "true";

  CalibrationParams& c = cfg.calibration;
  c.samples = static_cast<int>(raw.integer("calibration", "samples", c.samples));
  c.max_rounds = static_cast<int>(raw.integer("calibration", "max_rounds", c.max_rounds));
  c.factor = raw.number("calibration", "factor", c.factor);
  c.t_final = raw.number("calibration", "t_final", c.t_final);
  require_positive(c.t_final, "calibration t_final");
  if (c.samples < 1 || c.max_rounds < 0) throw ConfigError("calibration samples/rounds out of range");
  if (!(c.factor > 1.0)) throw ConfigError("calibration factor must exceed 1");

  // fail early on bad source terms
  for (const std::string& name : cfg.presets) {
    try {
      make_source(cfg, name);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("source is invalid for " + name + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) { return parse_experiment(Config::load(path)); }

PiecewiseConstantFn random_domain_profile(const HyperbolicSystem& system, std::mt19937_64& rng, int jumps,
                                          const FunctionalConstants& consts, double fill) {
  const int n = system.dim();
  if (jumps <= 0) return PiecewiseConstantFn(n);
  // a compactly supported profile needs two breakpoints
  jumps = std::max(jumps, 2);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), val(-1.0, 1.0), level(0.2, 1.0);
  std::vector<double> x;
  for (int k = 0; k < jumps; ++k) x.push_back(pos(rng));
  std::sort(x.begin(), x.end());
  std::vector<State> v{State::Zero(n)};
  for (int k = 0; k < jumps; ++k) {
    State s(n);
    for (int i = 0; i < n; ++i) s[i] = val(rng);
    v.push_back(s);
  }
  v.back().setZero();
  const PiecewiseConstantFn shape(x, v);
  if (shape.is_zero()) return shape;

  const double target = level(rng) * fill * consts.delta;
  const auto ups = [&](double scale) {
    const PiecewiseConstantFn u = scale * shape;
    if (u.sup_norm() >= 0.5 * system.omega_radius()) return std::numeric_limits<double>::infinity();
    return upsilon(decompose(system, u), system.field_kinds(), consts);
  };
  double scale = std::min(1.0, 0.25 * system.omega_radius() / shape.sup_norm());
  double value = ups(scale);
  for (int it = 0; it < 6 && std::isfinite(value) && std::abs(value - target) > 1e-3 * target; ++it) {
    scale *= target / value;
    value = ups(scale);
  }
  while (!(value < consts.delta)) {
    scale *= 0.5;
    value = ups(scale);
  }
  return scale * shape;
}

PiecewiseConstantFn initial_datum(const ExperimentConfig& cfg, const HyperbolicSystem& system, std::mt19937_64& rng,
                                  const FunctionalConstants& consts) {
  const int n = system.dim();
  if (cfg.datum.steps.empty())
    return random_domain_profile(system, rng, cfg.datum.random_jumps, consts, cfg.datum.fill);
  std::vector<std::pair<double, State>> steps;
  for (const auto& [x, values] : cfg.datum.steps) {
    if (static_cast<int>(values.size()) != n)
      throw ConfigError("datum values have " + std::to_string(values.size()) + " components, " + system.name() +
                        " needs " + std::to_string(n));
    State s(n);
    for (int i = 0; i < n; ++i) s[i] = values[i];
    if (!system.in_domain(s)) throw ConfigError("datum value outside the state domain");
    steps.emplace_back(x, s);
  }
  return PiecewiseConstantFn::from_steps(n, steps);
}

}  // namespace balaw
