#include "balaw/errors.hpp"
#include "balaw/experiments.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace balaw {

using json = nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

/// Independent stream per (seed, purpose, preset) so suites never share random state.
std::mt19937_64 stream(std::uint64_t seed, const std::string& purpose, const std::string& preset_name) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fnv1a(purpose)), static_cast<std::uint32_t>(fnv1a(preset_name))};
  return std::mt19937_64(seq);
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const Config& raw) {
  json out = json::object();
  for (const Config::Section& s : raw.sections()) {
    json sec = json::object();
    for (const Config::Entry& e : s.entries) sec[e.key] = e.value;
    out[s.name] = sec;
  }
  return out;
}

json constants_json(const FunctionalConstants& c) {
  return json{{"C0", c.C0}, {"kappa1", c.kappa1}, {"kappa2", c.kappa2}, {"delta", c.delta}};
}

json calibration_json(const CalibrationResult& c) {
  json j = constants_json(c.constants);
  j["certified"] = c.certified;
  j["rounds"] = c.rounds;
  j["ft_epsilons"] = c.ladder.epsilons;
  j["upsilon_increments"] = c.ladder.upsilon_increments;
  j["phi_increments"] = c.ladder.phi_increments;
  j["K_upsilon"] = c.ladder.k_upsilon;
  j["K_phi"] = c.ladder.k_phi;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double SuiteResult::metric(const std::string& name) const {
  for (const Metric& m : metrics)
    if (m.name == name) return m.value;
  throw InvalidArgument("no metric named " + name);
}

void SuiteResult::check(bool ok, const std::string& note) {
  if (ok) return;
  passed = false;
  notes.push_back(note);
}

void CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvTable::row(const std::vector<std::string>& values) {
  if (values.size() != columns_.size()) throw InvalidArgument("CSV row width does not match the header");
  std::string line;
  for (std::size_t k = 0; k < values.size(); ++k) line += (k ? "," : "") + values[k];
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out = "# schema=1\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) out += (k ? "," : "") + columns_[k];
  out += '\n';
  for (const std::string& r : rows_) out += r + '\n';
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

bool RunReport::passed() const {
  for (const SuiteResult& r : results)
    if (!r.passed) return false;
  for (const CalibrationResult& c : calibrations)
    if (!c.certified) return false;
  return true;
}

std::filesystem::path output_root(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("BALAW_OUTPUT_ROOT"); env && *env) return env;
  return cfg.output;
}

CalibrationResult calibrate_constants(const ExperimentConfig& cfg, const std::string& preset_name) {
  const HyperbolicSystem sys = preset(preset_name);
  const CalibrationParams& p = cfg.calibration;
  CalibrationResult out;
  out.preset = preset_name;
  FunctionalConstants consts = cfg.constants;
  const int jumps = std::max(2, cfg.datum.random_jumps);
  for (int round = 0; round <= p.max_rounds; ++round) {
    // the same shapes every round, rescaled into the domain of the current constants
    std::mt19937_64 rng = stream(cfg.seed, "calibration", preset_name);
    std::vector<std::pair<PiecewiseConstantFn, PiecewiseConstantFn>> corpus;
    for (int k = 0; k < p.samples; ++k) {
      PiecewiseConstantFn u = random_domain_profile(sys, rng, jumps, consts, cfg.datum.fill);
      PiecewiseConstantFn w = random_domain_profile(sys, rng, jumps, consts, cfg.datum.fill);
      corpus.emplace_back(std::move(u), std::move(w));
    }
    out.constants = consts;
    out.rounds = round;
    out.ladder = monotonicity_ladder(sys, corpus, cfg.params, p.t_final, consts);
    if (out.ladder.ok()) {
      out.certified = true;
      return out;
    }
    consts.C0 *= p.factor;
    consts.kappa1 *= p.factor;
    consts.kappa2 *= p.factor;
  }
  return out;
}

std::vector<CalibrationResult> run_calibration(const ExperimentConfig& cfg) {
  std::vector<CalibrationResult> out;
  json j = json::object();
  j["schema"] = 1;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["ft_epsilons"] = cfg.params.ft_epsilons;
  j["constants"] = json::object();
  for (const std::string& name : cfg.presets) {
    out.push_back(calibrate_constants(cfg, name));
    j["constants"][name] = calibration_json(out.back());
  }
  const std::filesystem::path dir = output_root(cfg) / cfg.name;
  std::filesystem::create_directories(dir);
  write_text(dir / "calibration.json", j.dump(2) + "\n");
  return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport report;
  report.directory = output_root(cfg) / cfg.name;
  std::filesystem::create_directories(report.directory);

  std::map<std::string, FunctionalConstants> constants;
  for (const std::string& name : cfg.presets) {
    if (cfg.calibrate) {
      report.calibrations.push_back(calibrate_constants(cfg, name));
      constants[name] = report.calibrations.back().constants;
    } else {
      constants[name] = cfg.constants;
    }
  }

  json manifest = json::object();
  manifest["schema"] = 1;
  manifest["name"] = cfg.name;
  manifest["config_file"] = cfg.raw.origin();
  manifest["config"] = config_json(cfg.raw);
  manifest["seed"] = cfg.seed;
  json cj = json::object();
  for (const std::string& name : cfg.presets) {
    json c = constants_json(constants[name]);
    for (const CalibrationResult& cal : report.calibrations)
      if (cal.preset == name) c = calibration_json(cal);
    c["origin"] = cfg.calibrate ? "calibrated" : "configured";
    cj[name] = c;
  }
  manifest["constants"] = cj;
  manifest["suites"] = json::array();

  std::string numerical_failure;
  for (const std::string& suite : cfg.suites) {
    const SuiteFn fn = find_suite(suite);
    for (const std::string& name : cfg.presets) {
      const SourceSpec source = make_source(cfg, name);
      std::mt19937_64 rng = stream(cfg.seed, suite, name);
      std::map<std::string, CsvTable> tables;
      SuiteContext ctx{cfg, source.system(), source, constants[name], rng, tables};
      SuiteResult result;
      try {
        result = fn(ctx);
      } catch (const NumericalError& e) {
        result = SuiteResult{};
        result.passed = false;
        result.notes.push_back(std::string("numerical failure: ") + e.what());
        if (numerical_failure.empty()) numerical_failure = suite + " on " + name + ": " + e.what();
      }
      result.suite = suite;
      result.preset = name;
      json files = json::array();
      for (const auto& [stem, table] : tables) {
        table.write(report.directory / (stem + ".csv"));
        files.push_back(stem + ".csv");
      }
      json metrics = json::object();
      for (const Metric& m : result.metrics) metrics[m.name] = number_json(m.value);
      manifest["suites"].push_back(json{{"suite", suite},
                                        {"preset", name},
                                        {"passed", result.passed},
                                        {"metrics", metrics},
                                        {"metrics_origin", "measured"},
                                        {"notes", result.notes},
                                        {"files", files}});
      report.results.push_back(std::move(result));
    }
  }
  manifest["passed"] = report.passed() && numerical_failure.empty();
  write_text(report.directory / "manifest.json", manifest.dump(2) + "\n");
  if (!numerical_failure.empty()) throw NumericalError(numerical_failure);
  return report;
}

}  // namespace balaw
