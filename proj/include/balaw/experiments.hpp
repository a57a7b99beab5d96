#pragma once

#include "balaw/front_tracking.hpp"
#include "balaw/functionals.hpp"
#include "balaw/source_operator.hpp"
#include "balaw/splitting_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace balaw {

/// Flat key-value text with [section] headers. '#' starts a comment; keys keep file order.
class Config {
 public:
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  /// Throws ConfigError if absent.
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& section, const std::string& key,
                                 const std::vector<std::string>& fallback) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::vector<Section>& sections() const { return sections_; }
  const std::string& origin() const { return origin_; }

 private:
  const Entry* find(const std::string& section, const std::string& key) const;
  std::vector<Section> sections_;
  std::string origin_;
};

struct DatumSpec {
  /// Explicit steps (x, value right of x); empty means random data.
  std::vector<std::pair<double, std::vector<double>>> steps;
  int random_jumps = 8;
  /// Target Upsilon of random data as a fraction of delta.
  double fill = 0.5;
};

struct SuiteParams {
  int samples = 200;
  int pairs = 4;
  std::vector<double> s_values{0.01, 0.005, 0.0025};
  std::vector<double> ft_epsilons{4e-3, 2e-3, 1e-3};
  std::vector<double> t_values{0.08, 0.04, 0.02, 0.01};
  std::vector<double> etas{0.02, 0.01, 0.005};
  std::vector<std::string> perturbations{"kernel", "local"};
  int substeps = 8;
  int n_cells = -1;
  double stability = 0.5;
  double max_equivalence = 10.0;
  double min_order = 0.9;
  double slack = 1e-12;
  /// Front-tracking runs of srs-monotone and calibration resolve every interaction with the
  /// accurate solver; false uses the simplified solver below epsilon^2.
  bool accurate_only = true;
};

/// Geometric search for C0, kappa1, kappa2 on the srs-monotone ladder ([suite] ft_epsilons).
struct CalibrationParams {
  int samples = 3;
  int max_rounds = 6;
  double factor = 2.0;
  double t_final = 1.0;
};

struct ExperimentConfig {
  Config raw;
  std::string name = "run";
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  std::string output = "results";
  std::vector<std::string> presets{"PSystem"};
  std::string local = "LinearDamping(1)";
  std::string kernel = "Zero";
  double s_max = 0.01;
  DatumSpec datum;
  std::vector<double> epsilon_ladder{0.01, 0.005, 0.0025};
  double t_final = 1.0;
  bool calibrate = false;
  FunctionalConstants constants;
  SuiteParams params;
  CalibrationParams calibration;
};

/// Validates every key; unknown sections or keys are configuration errors.
ExperimentConfig parse_experiment(const Config& raw);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// "LinearDamping(beta)", "ShearDamping(beta, eps)" or "Zero".
LocalSource make_local_source(const std::string& text, int n);
/// "Zero", "Box(alpha, w)" or "Exp(alpha, mesh)"; alpha may be "cap" for 0.05 c.
ConvolutionKernel make_kernel(const std::string& text, int n, double c);
SourceSpec make_source(const ExperimentConfig& cfg, const std::string& preset_name);

/// Random profile with the given number of jumps in [-1, 1], rescaled so that Upsilon is
/// close to fill * delta (and strictly below delta).
PiecewiseConstantFn random_domain_profile(const HyperbolicSystem& system, std::mt19937_64& rng, int jumps,
                                          const FunctionalConstants& consts, double fill);
PiecewiseConstantFn initial_datum(const ExperimentConfig& cfg, const HyperbolicSystem& system, std::mt19937_64& rng,
                                  const FunctionalConstants& consts);

struct Metric {
  std::string name;
  double value = 0.0;
};

struct SuiteResult {
  std::string suite;
  std::string preset;
  bool passed = true;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;

  void add(const std::string& name, double value) { metrics.push_back({name, value}); }
  double metric(const std::string& name) const;
  void check(bool ok, const std::string& note);
};

/// Rows written below a "# schema=1" line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  std::string str() const;
  void write(const std::filesystem::path& path) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

std::string format_number(double v);

struct SuiteContext {
  const ExperimentConfig& config;
  const HyperbolicSystem& system;
  const SourceSpec& source;
  FunctionalConstants constants;
  std::mt19937_64& rng;
  /// Tables keyed by file stem; written by the runner.
  std::map<std::string, CsvTable>& tables;
};

using SuiteFn = SuiteResult (*)(SuiteContext&);

const std::vector<std::string>& suite_names();
/// Throws UnknownSuite.
SuiteFn find_suite(const std::string& name);

struct SizeEstimateReport {
  std::vector<double> s_values;
  std::vector<double> k_size;
  std::vector<double> k_size_bis;
  int samples = 0;
};
/// Size-estimate constants fitted at each s: u+ = u- + s a, v+ = v- + s b (and the variant
/// with g added to both displacements), for Psi and for the shock gluing.
SizeEstimateReport size_estimates(const HyperbolicSystem& system, const LocalSource& g, std::mt19937_64& rng,
                                  int samples, const std::vector<double>& s_values, bool shocks);

/// Largest increase of Upsilon (over u and w) across interactions, and of Phi(u, w) between
/// consecutive interaction times of either run, along front tracking up to t.
struct MonotonicityProbe {
  double upsilon_increment = 0.0;
  double phi_increment = 0.0;
  std::size_t events = 0;
};
MonotonicityProbe probe_monotonicity(const HyperbolicSystem& system, const PiecewiseConstantFn& u,
                                     const PiecewiseConstantFn& w, const FrontTrackingOptions& tracking, double t,
                                     const FunctionalConstants& consts);
FrontTrackingOptions probe_tracking(double epsilon, bool accurate_only);

/// Probes along a ladder of front-tracking accuracies. K is fitted on the coarsest rung and
/// every rung must satisfy increment <= (1 + stability) K epsilon + slack.
struct MonotonicityLadder {
  std::vector<double> epsilons;
  std::vector<double> upsilon_increments;
  std::vector<double> phi_increments;
  std::vector<std::size_t> events;
  double k_upsilon = 0.0;
  double k_phi = 0.0;
  bool upsilon_ok = true;
  bool phi_ok = true;
  bool ok() const { return upsilon_ok && phi_ok; }
};
MonotonicityLadder monotonicity_ladder(const HyperbolicSystem& system,
                                       const std::vector<std::pair<PiecewiseConstantFn, PiecewiseConstantFn>>& corpus,
                                       const SuiteParams& params, double t, const FunctionalConstants& consts);

struct CalibrationResult {
  std::string preset;
  FunctionalConstants constants;
  bool certified = false;
  int rounds = 0;
  MonotonicityLadder ladder;
};

CalibrationResult calibrate_constants(const ExperimentConfig& cfg, const std::string& preset_name);

struct RunReport {
  std::filesystem::path directory;
  std::vector<SuiteResult> results;
  std::vector<CalibrationResult> calibrations;
  bool passed() const;
};

/// Output root: $BALAW_OUTPUT_ROOT when set, else the configured directory.
std::filesystem::path output_root(const ExperimentConfig& cfg);

/// Runs every requested suite on every preset, writes CSVs and manifest.json.
RunReport run_experiment(const ExperimentConfig& cfg);
/// Writes calibration.json next to the run outputs.
std::vector<CalibrationResult> run_calibration(const ExperimentConfig& cfg);

}  // namespace balaw
