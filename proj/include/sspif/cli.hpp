#pragma once

#include "sspif/analysis.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sspif {

/// Parameters of one experiment run.  Serialized as flat `key = value`
/// lines; list values are comma separated.
struct ExperimentConfig {
  std::string experiment = "ex3";  // ex1|ex3|ex4|table6|table7|table8-partial|fig1
  std::vector<std::string> methods;
  std::vector<double> a_values;
  int grid = 0;
  /// Grid of the dense operator used for the L2 stability bisection.
  int l2_grid = 200;
  int steps = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int lambda_points = 0;
  /// Upper end of the observed-lambda pre-scan; 0 selects 2 C + 1 per method.
  double lambda_hi = 0.0;
  double threshold = kTvThreshold;
  double weno_eps = kDefaultWenoEps;
  std::string splitting = "both";
  std::vector<double> dts;
  double final_time = 0.5;
  std::string out = "results";
  std::uint64_t seed = 20180417;
};

/// Experiment defaults (grid size, steps, methods, lambda ranges).
ExperimentConfig default_config(const std::string& experiment);

/// Parses `key = value` lines ('#' starts a comment) on top of the defaults of
/// the experiment named by the `experiment` key (or `experiment` when the
/// text has none).  Throws ConfigError for unknown keys or bad values.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment = "");
/// Applies key/value overrides with the same rules.
void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);
std::string to_config_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of to_config_text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Resolves a scheme by name: "eSSPIFRK(s,p)" is the integrating-factor form of
/// eSSPRK+(s,p), "IF-<method>" the integrating-factor recurrence of any
/// registered method, "SOIF" the Shu--Osher eSSPRK(3,3) integrating-factor
/// scheme, and any other registered name plain RK on L + N.
Scheme scheme_by_name(const std::string& name);

struct ConvergenceRow {
  std::string method;
  char splitting = 'a';
  double dt = 0.0;
  double error = 0.0;
};

/// Van der Pol errors at final_time against a plain eSSPRK(10,4) reference
/// with dt = 1e-5.  Each nominal dt is rounded to T / ceil(T / dt).
std::vector<ConvergenceRow> van_der_pol_errors(const std::string& method, char splitting,
                                               const std::vector<double>& dts, double final_time);

/// `lambda,max_rise,log10_rise` rows followed by `# key=value` metadata.
std::string sweep_csv(const std::vector<SweepRecord>& records, const std::map<std::string, std::string>& meta);

/// Runs an experiment, writing CSV files under cfg.out.  Returns 0, or 2 if
/// any run hit non-finite values.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Entry point of the `sspif` executable.
int cli_main(int argc, char** argv);

}  // namespace sspif
