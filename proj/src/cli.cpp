#include "sspif/cli.hpp"

#include "sspif/io.hpp"
#include "sspif/optimizer.hpp"
#include "sspif/ssp_radius.hpp"
#include "sspif/tableau_json.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#ifndef SSPIF_VERSION
#define SSPIF_VERSION "dev"
#endif

namespace sspif {

namespace {

const std::set<std::string> kExperiments = {"ex1", "ex3", "ex4", "table6", "table7", "table8-partial", "fig1"};

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string full_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      if (!trim(item).empty()) out.push_back(trim(item));
      item.clear();
    } else {
      item += ch;
    }
  }
  if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) out += xs[i];
    else out += full_num(xs[i]);
  }
  return out;
}

std::string file_token(const std::string& name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) out += ch;
    else if (ch == '+') out += "plus";
    else if (ch == ',') out += "_";
    else if (ch == '-') out += "-";
  }
  return out;
}

std::vector<std::string> plus_method_names(bool integrating_factor) {
  std::vector<std::string> out;
  for (const auto& m : all_methods()) {
    if (m->family != Family::eSSPRKplus) continue;
    out.push_back(integrating_factor ? "eSSPIFRK" + m->name().substr(7) : m->name());
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (!kExperiments.count(cfg.experiment)) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.methods.empty()) throw ConfigError("no methods selected");
  if (cfg.experiment == "ex1") {
    if (cfg.splitting != "a" && cfg.splitting != "b" && cfg.splitting != "both")
      throw ConfigError("splitting must be a, b or both");
    if (cfg.dts.size() < 3) throw ConfigError("ex1 needs at least three step sizes");
    for (double dt : cfg.dts)
      if (!(dt > 0.0)) throw ConfigError("step sizes must be positive");
    if (!(cfg.final_time > 0.0)) throw ConfigError("final_time must be positive");
    return;
  }
  if (cfg.grid < 8) throw ConfigError("grid must be at least 8");
  if (cfg.l2_grid < 8) throw ConfigError("l2_grid must be at least 8");
  if (cfg.steps < 1) throw ConfigError("steps must be positive");
  if (cfg.a_values.empty()) throw ConfigError("no wavespeeds selected");
  for (double a : cfg.a_values)
    if (!(a >= 0.0)) throw ConfigError("wavespeeds must be >= 0");
  if (cfg.experiment == "ex3" || cfg.experiment == "ex4" || cfg.experiment == "fig1") {
    if (cfg.lambda_points < 1) throw ConfigError("lambda_points must be positive");
    if (!(cfg.lambda_min > 0.0) || cfg.lambda_max < cfg.lambda_min)
      throw ConfigError("need 0 < lambda_min <= lambda_max");
  }
  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold must be positive");
  if (!(cfg.weno_eps > 0.0)) throw ConfigError("weno_eps must be positive");
  if (cfg.lambda_hi < 0.0) throw ConfigError("lambda_hi must be >= 0");
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment) {
  if (!kExperiments.count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.out = "results";
  if (experiment == "ex1") {
    for (const auto& m : all_methods())
      cfg.methods.push_back(m->family == Family::eSSPRKplus ? "eSSPIFRK" + m->name().substr(7) : "IF-" + m->name());
    cfg.dts = {0.02, 0.04, 0.06, 0.08, 0.10};
  } else if (experiment == "ex3" || experiment == "table6") {
    cfg.methods = plus_method_names(true);
    cfg.a_values = {0, 1, 10, 20};
    cfg.grid = 1000;
    cfg.steps = 10;
    cfg.lambda_min = 0.02;
    cfg.lambda_max = 3.0;
    cfg.lambda_points = 150;
  } else if (experiment == "table7") {
    cfg.methods = {"eSSPRK(2,2)", "eSSPRK(3,3)", "eSSPRK(4,3)", "eSSPRK(5,4)", "eSSPRK(10,4)"};
    cfg.a_values = {0, 1, 2, 10, 20};
    cfg.grid = 1000;
    cfg.steps = 10;
  } else if (experiment == "table8-partial") {
    cfg.methods = {"eSSPRK(3,3)", "eSSPRK+(3,3)", "eSSPIFRK(3,3)", "eSSPRK+(6,4)", "eSSPIFRK(6,4)"};
    cfg.a_values = {10};
    cfg.grid = 1000;
    cfg.steps = 10;
  } else if (experiment == "ex4") {
    cfg.methods = {"eSSPIFRK(3,3)", "eSSPIFRK(5,4)", "eSSPIFRK(6,4)", "eSSPRK(10,4)"};
    cfg.a_values = {10};
    cfg.grid = 400;
    cfg.steps = 25;
    cfg.lambda_min = 0.01;
    cfg.lambda_max = 1.5;
    cfg.lambda_points = 150;
  } else if (experiment == "fig1") {
    cfg.methods = {"SOIF", "eSSPIFRK(3,3)"};
    cfg.a_values = {10};
    cfg.grid = 400;
    cfg.steps = 25;
    cfg.lambda_min = 0.01;
    cfg.lambda_max = 1.2;
    cfg.lambda_points = 120;
  }
  return cfg;
}

void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "experiment") {
      if (value != cfg.experiment) throw ConfigError("experiment must be set before other keys");
    } else if (key == "methods") {
      cfg.methods = split_list(value);
    } else if (key == "a") {
      cfg.a_values = to_doubles(key, value);
    } else if (key == "grid") {
      cfg.grid = static_cast<int>(to_int(key, value));
    } else if (key == "l2_grid") {
      cfg.l2_grid = static_cast<int>(to_int(key, value));
    } else if (key == "steps") {
      cfg.steps = static_cast<int>(to_int(key, value));
    } else if (key == "lambda_min") {
      cfg.lambda_min = to_double(key, value);
    } else if (key == "lambda_max") {
      cfg.lambda_max = to_double(key, value);
    } else if (key == "lambda_points") {
      cfg.lambda_points = static_cast<int>(to_int(key, value));
    } else if (key == "lambda_hi") {
      cfg.lambda_hi = to_double(key, value);
    } else if (key == "threshold") {
      cfg.threshold = to_double(key, value);
    } else if (key == "weno_eps") {
      cfg.weno_eps = to_double(key, value);
    } else if (key == "splitting") {
      cfg.splitting = value;
    } else if (key == "dt") {
      cfg.dts = to_doubles(key, value);
    } else if (key == "final_time") {
      cfg.final_time = to_double(key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate(cfg);
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  std::string name = experiment;
  if (auto it = kv.find("experiment"); it != kv.end()) {
    if (!experiment.empty() && experiment != it->second)
      throw ConfigError("config is for '" + it->second + "', not '" + experiment + "'");
    name = it->second;
  }
  if (name.empty()) throw ConfigError("config does not name an experiment");
  ExperimentConfig cfg = default_config(name);
  apply_settings(cfg, kv);
  return cfg;
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment = " << cfg.experiment << "\n"
     << "methods = " << join(cfg.methods) << "\n"
     << "a = " << join(cfg.a_values) << "\n"
     << "grid = " << cfg.grid << "\n"
     << "l2_grid = " << cfg.l2_grid << "\n"
     << "steps = " << cfg.steps << "\n"
     << "lambda_min = " << full_num(cfg.lambda_min) << "\n"
     << "lambda_max = " << full_num(cfg.lambda_max) << "\n"
     << "lambda_points = " << cfg.lambda_points << "\n"
     << "lambda_hi = " << full_num(cfg.lambda_hi) << "\n"
     << "threshold = " << full_num(cfg.threshold) << "\n"
     << "weno_eps = " << full_num(cfg.weno_eps) << "\n"
     << "splitting = " << cfg.splitting << "\n"
     << "dt = " << join(cfg.dts) << "\n"
     << "final_time = " << full_num(cfg.final_time) << "\n"
     << "out = " << cfg.out << "\n"
     << "seed = " << cfg.seed << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_config_text(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Scheme scheme_by_name(const std::string& name) {
  if (name == "SOIF") return shu_osher_if_scheme();
  if (name == "SSPIFRK33") return ifrk_scheme(get_method("eSSPRK+(3,3)"));
  if (name.rfind("IF-", 0) == 0) {
    const MethodRecord& m = get_method(name.substr(3));
    if (abscissas_nondecreasing(m.tableau)) {
      Scheme s = ifrk_scheme(m);
      s.name = "IF-" + m.name();
      return s;
    }
    return general_ifrk_scheme("IF-" + m.name(), stepping_form(m), m.tableau.c());
  }
  if (name.rfind("eSSPIFRK", 0) == 0) return ifrk_scheme(get_method(name));
  return plain_rk_scheme(get_method(name));
}

namespace {

Vector van_der_pol_reference(double final_time) {
  static std::mutex mu;
  static std::map<double, Vector> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(final_time); it != cache.end()) return it->second;
  const ProblemSetup p = make_van_der_pol('a');
  const int n = static_cast<int>(std::ceil(final_time / 1e-5 - 1e-9));
  const Stepper stepper = plain_rk_scheme(get_method("eSSPRK(10,4)")).bind(p.system, final_time / n);
  Vector ref = integrate(stepper, p.initial, n);
  cache.emplace(final_time, ref);
  return ref;
}

}  // namespace

std::vector<ConvergenceRow> van_der_pol_errors(const std::string& method, char splitting,
                                               const std::vector<double>& dts, double final_time) {
  const Vector ref = van_der_pol_reference(final_time);
  const ProblemSetup p = make_van_der_pol(splitting);
  const Scheme scheme = scheme_by_name(method);
  std::vector<ConvergenceRow> rows;
  for (double dt : dts) {
    const int n = static_cast<int>(std::ceil(final_time / dt - 1e-9));
    const double h = final_time / n;
    const Vector u = integrate(scheme.bind(p.system, h), p.initial, n);
    rows.push_back({scheme.name, splitting, h, (u - ref).norm()});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRecord>& records, const std::map<std::string, std::string>& meta) {
  std::ostringstream os;
  os << "lambda,max_rise,log10_rise\n";
  for (const auto& r : records) os << num(r.lambda) << "," << num(r.max_rise) << "," << num(r.log10_rise) << "\n";
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
  return os.str();
}

namespace {

std::string table_csv(const std::string& header, const std::vector<std::string>& rows,
                      const std::map<std::string, std::string>& meta) {
  std::string out = header + "\n";
  for (const auto& r : rows) out += r + "\n";
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

double method_C(const std::string& scheme_name) {
  if (scheme_name == "SOIF") return get_method("eSSPRK(3,3)").claimed_C;
  const std::string base = scheme_name.rfind("IF-", 0) == 0 ? scheme_name.substr(3) : scheme_name;
  return get_method(base).claimed_C;
}

bool is_integrating_factor(const std::string& scheme_name) {
  return scheme_name == "SOIF" || scheme_name.rfind("IF-", 0) == 0 || scheme_name.rfind("eSSPIFRK", 0) == 0;
}

ProblemKind problem_for(const std::string& experiment) {
  return experiment == "ex4" || experiment == "fig1" ? ProblemKind::AdvectionBurgersStep
                                                     : ProblemKind::LinearAdvectionStep;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  std::map<std::string, std::string> base_meta{
      {"config_hash", config_hash(cfg)}, {"experiment", cfg.experiment}, {"version", SSPIF_VERSION}};
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  int status = 0;
  auto flag_nonfinite = [&](const std::string& method, double lambda) {
    std::cerr << "non-finite values: method " << method << ", lambda " << num(lambda) << "\n";
    status = 2;
  };

  if (cfg.experiment == "ex1") {
    std::vector<char> splittings;
    if (cfg.splitting != "b") splittings.push_back('a');
    if (cfg.splitting != "a") splittings.push_back('b');
    std::vector<std::string> err_rows, slope_rows;
    for (const auto& name : cfg.methods) {
      const std::string base = name.rfind("IF-", 0) == 0 ? name.substr(3) : name;
      const int order = get_method(base).order();
      for (char sp : splittings) {
        std::vector<ConvergenceRow> rows;
        try {
          rows = van_der_pol_errors(name, sp, cfg.dts, cfg.final_time);
        } catch (const NonFinite&) {
          flag_nonfinite(name, 0.0);
          continue;
        }
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) {
          err_rows.push_back(r.method + "," + std::string(1, sp) + "," + num(r.dt) + "," + num(r.error));
          pts.emplace_back(r.dt, r.error);
        }
        const double slope = convergence_slope(pts);
        slope_rows.push_back(rows.front().method + "," + std::string(1, sp) + "," + std::to_string(order) + "," +
                             num(slope));
        log << rows.front().method << " splitting " << sp << ": slope " << num(slope) << " (order " << order
            << ")\n";
      }
    }
    write_file_atomic((dir / "ex1_errors.csv").string(),
                      table_csv("method,splitting,dt,error", err_rows, base_meta));
    write_file_atomic((dir / "ex1_slopes.csv").string(),
                      table_csv("method,splitting,order,slope", slope_rows, base_meta));
    return status;
  }

  if (cfg.experiment == "ex3" || cfg.experiment == "ex4" || cfg.experiment == "fig1") {
    std::vector<double> lambdas(static_cast<std::size_t>(cfg.lambda_points));
    for (int k = 0; k < cfg.lambda_points; ++k)
      lambdas[static_cast<std::size_t>(k)] =
          cfg.lambda_points == 1 ? cfg.lambda_min
                                 : cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * k / (cfg.lambda_points - 1);
    for (const auto& name : cfg.methods) {
      const Scheme scheme = scheme_by_name(name);
      for (double a : cfg.a_values) {
        const ProblemSetup problem = make_problem(problem_for(cfg.experiment), a, cfg.grid, cfg.weno_eps);
        const auto records = lambda_sweep(scheme, problem, lambdas, cfg.steps);
        for (const auto& r : records)
          if (std::isinf(r.max_rise)) flag_nonfinite(name, r.lambda);
        auto meta = base_meta;
        meta["method"] = scheme.name;
        meta["a"] = num(a);
        meta["problem"] = to_string(problem.kind);
        const std::string file = cfg.experiment + "_" + file_token(scheme.name) + "_a" + num(a) + ".csv";
        write_file_atomic((dir / file).string(), sweep_csv(records, meta));
        log << "wrote " << (dir / file).string() << "\n";
      }
    }
    return status;
  }

  if (cfg.experiment == "table6" || cfg.experiment == "table7") {
    std::vector<std::string> rows;
    for (const auto& name : cfg.methods) {
      const Scheme scheme = scheme_by_name(name);
      const double C = method_C(name);
      for (double a : cfg.a_values) {
        const ProblemSetup problem = make_problem(ProblemKind::LinearAdvectionStep, a, cfg.grid);
        const double hi = cfg.lambda_hi > 0.0 ? cfg.lambda_hi : 2.0 * C + 1.0;
        const auto obs = observed_tvd_lambda(scheme, problem, hi, cfg.steps, cfg.threshold);
        rows.push_back(scheme.name + "," + num(a) + "," + num(obs.lambda_obs) + "," + num(obs.bisection_width) +
                       "," + (obs.bracketed ? "true" : "false"));
        log << scheme.name << " a=" << num(a) << ": lambda_obs " << num(obs.lambda_obs) << "\n";
      }
    }
    write_file_atomic((dir / (cfg.experiment + ".csv")).string(),
                      table_csv("method,a,lambda_obs,half_width,bracketed", rows, base_meta));
    return status;
  }

  // table8-partial
  std::vector<std::string> rows;
  for (const auto& name : cfg.methods) {
    const Scheme scheme = scheme_by_name(name);
    const double C = method_C(name);
    for (double a : cfg.a_values) {
      const ProblemSetup problem = make_problem(ProblemKind::LinearAdvectionStep, a, cfg.grid);
      const bool integrating = is_integrating_factor(name);
      std::string l2;
      if (integrating) {
        const ProblemSetup small = make_problem(ProblemKind::LinearAdvectionStep, a, cfg.l2_grid);
        l2 = l2_stable(scheme, small, 27.0, 200, cfg.seed) ? ">=27" : "unstable@27";
      } else {
        const Grid1D grid(cfg.l2_grid);
        const Matrix M = upwind_matrix(grid, a + 1.0) * grid.dx;
        l2 = num(observed_l2_cfl(get_method(name).tableau, M, 2.0, 500, cfg.seed));
      }
      const double pred = integrating ? C : C / (a + 1.0);
      const double hi = cfg.lambda_hi > 0.0 ? cfg.lambda_hi : 2.0 * pred + 1.0;
      const auto obs = observed_tvd_lambda(scheme, problem, hi, cfg.steps, cfg.threshold);
      rows.push_back(scheme.name + "," + num(a) + "," + l2 + "," + num(pred) + "," + num(obs.lambda_obs));
      log << scheme.name << ": L2 " << l2 << ", TVD predicted " << num(pred) << ", observed "
          << num(obs.lambda_obs) << "\n";
    }
  }
  write_file_atomic((dir / "table8.csv").string(),
                    table_csv("method,a,lambda_l2_obs,lambda_tvd_pred,lambda_tvd_obs", rows, base_meta));
  return status;
}

namespace {

void print_verify(const MethodRecord& m, std::ostream& os, bool& ok) {
  const auto radius = ssp_radius(m.tableau);
  const auto report = order_residuals(m.tableau);
  const bool nondecreasing = abscissas_nondecreasing(m.tableau);
  os << m.name() << "\n"
     << "  s = " << m.stages() << ", p = " << m.order() << "\n"
     << std::fixed << std::setprecision(4) << "  C = " << radius.radius << " (claimed " << m.claimed_C << ")\n"
     << "  C_eff = " << radius.radius / m.stages() << "\n"
     << "  nondecreasing = " << (nondecreasing ? "true" : "false") << "\n";
  os << std::scientific << std::setprecision(2);
  for (const auto& cond : kOrderConditions)
    os << "  " << std::left << std::setw(7) << cond.tag << std::right << " (order " << cond.order
       << ") residual " << report.residuals.at(cond.tag) << "\n";
  os << std::defaultfloat << std::setprecision(6);
  os << "  achieved order = " << report.achieved_order << "\n";
  const double tol = m.name() == "eSSPRK(5,4)" ? 1e-3 : 1e-4;
  if (radius.radius < m.claimed_C - tol) {
    os << "  FAIL: radius below claimed C\n";
    ok = false;
  }
  if (report.achieved_order < m.order()) {
    os << "  FAIL: order conditions\n";
    ok = false;
  }
  if (m.family == Family::eSSPRKplus && !nondecreasing) {
    os << "  FAIL: abscissas decrease\n";
    ok = false;
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Strong-stability-preserving Runge-Kutta and integrating-factor toolkit"};
  app.set_version_flag("--version", std::string(SSPIF_VERSION));
  app.require_subcommand(1);
  app.footer(
      "Environment: SSPIF_THREADS sets the worker thread count (default 1).\n"
      "Exit codes: 0 success, 1 configuration or usage error, 2 non-finite values in a run, 3 failed verification.");

  auto* methods = app.add_subcommand("methods", "List, verify or export built-in methods");
  methods->require_subcommand(1);
  auto* list = methods->add_subcommand("list", "List registered methods with s, p, C");
  std::string filter;
  list->add_option("--filter", filter, "Keep names containing this substring");
  auto* verify = methods->add_subcommand("verify", "Recompute C, order residuals and abscissa ordering");
  std::string verify_name;
  verify->add_option("name", verify_name, "Method name, or 'all'")->required();
  auto* exporter = methods->add_subcommand("export", "Write a method's Butcher tableau as JSON");
  std::string export_name, export_out;
  exporter->add_option("name", export_name, "Method name")->required();
  exporter->add_option("--out", export_out, "Output file (stdout when omitted)");

  auto* radius = app.add_subcommand("radius", "SSP coefficient of a registered method or a tableau JSON file");
  std::string radius_target;
  radius->add_option("target", radius_target, "Method name or path to a JSON tableau")->required();

  auto* opt = app.add_subcommand("optimize", "Search for optimal SSP coefficients");
  OptimizationSpec spec;
  std::string opt_out;
  opt->add_option("--stages", spec.s, "Number of stages")->required();
  opt->add_option("--order", spec.p, "Order of accuracy (1-4)")->required();
  opt->add_flag("--nondecreasing,!--any-abscissas", spec.require_nondecreasing,
                "Require non-decreasing abscissas (default)");
  opt->add_option("--restarts", spec.restarts, "Random restarts")->capture_default_str();
  opt->add_option("--seed", spec.seed, "Seed")->capture_default_str();
  opt->add_option("--r-tolerance", spec.r_tolerance, "Bisection width in r")->capture_default_str();
  opt->add_option("--out", opt_out, "Certificate JSON output");
  auto* check = app.add_subcommand("check", "Re-verify an optimizer certificate JSON file");
  std::string check_file;
  check->add_option("file", check_file, "Certificate JSON")->required();

  auto* run = app.add_subcommand("run", "Run an experiment and write CSV files");
  run->footer(
      "Experiments and CSV columns:\n"
      "  ex1            ex1_errors.csv: method,splitting,dt,error; ex1_slopes.csv: method,splitting,order,slope\n"
      "  ex3, ex4, fig1 <exp>_<method>_a<a>.csv: lambda,max_rise,log10_rise\n"
      "  table6, table7 <exp>.csv: method,a,lambda_obs,half_width,bracketed\n"
      "  table8-partial table8.csv: method,a,lambda_l2_obs,lambda_tvd_pred,lambda_tvd_obs\n"
      "Every CSV ends with '# key=value' lines (config_hash, experiment, version, ...).\n"
      "Config file keys: experiment methods a grid l2_grid steps lambda_min lambda_max lambda_points\n"
      "lambda_hi threshold weno_eps splitting dt final_time out seed.  Flags override the file.");
  std::string experiment, config_file;
  std::map<std::string, std::string> flag_values;
  run->add_option("experiment", experiment, "ex1|ex3|ex4|table6|table7|table8-partial|fig1")
      ->check(CLI::IsMember(kExperiments));
  run->add_option("--config", config_file, "Flat key = value config file");
  const std::vector<std::pair<std::string, std::string>> run_flags = {
      {"--method", "methods"},       {"--a", "a"},
      {"--grid", "grid"},            {"--l2-grid", "l2_grid"},
      {"--steps", "steps"},          {"--lambda-min", "lambda_min"},
      {"--lambda-max", "lambda_max"}, {"--points", "lambda_points"},
      {"--lambda-hi", "lambda_hi"},  {"--threshold", "threshold"},
      {"--weno-eps", "weno_eps"},    {"--splitting", "splitting"},
      {"--dt", "dt"},
      {"--final-time", "final_time"}, {"--out", "out"},
      {"--seed", "seed"}};
  for (const auto& [flag, key] : run_flags) run->add_option(flag, flag_values[key], "Sets '" + key + "'");

  auto* sweep = app.add_subcommand("sweep", "Lambda sweep of one scheme on one problem");
  std::string sweep_method = "eSSPIFRK(3,3)", sweep_problem = "ex3", sweep_out;
  double sweep_a = 10.0, lmin = 0.01, lmax = 2.0, sweep_eps = kDefaultWenoEps;
  int sweep_grid = 1000, sweep_steps = 10, sweep_points = 100;
  sweep->add_option("--method", sweep_method, "Scheme name")->capture_default_str();
  sweep->add_option("--problem", sweep_problem, "ex3 or ex4")->capture_default_str();
  sweep->add_option("--a", sweep_a, "Wavespeed of the linear part")->capture_default_str();
  sweep->add_option("--grid", sweep_grid, "Grid cells")->capture_default_str();
  sweep->add_option("--steps", sweep_steps, "Time steps")->capture_default_str();
  sweep->add_option("--lambda-min", lmin)->capture_default_str();
  sweep->add_option("--lambda-max", lmax)->capture_default_str();
  sweep->add_option("--points", sweep_points)->capture_default_str();
  sweep->add_option("--weno-eps", sweep_eps, "WENO regularization")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV output (stdout when omitted)");
  sweep->footer("CSV columns: lambda,max_rise,log10_rise, then '# key=value' metadata.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (methods->got_subcommand(list)) {
      std::cout << std::left << std::setw(16) << "name" << std::right << std::setw(4) << "s" << std::setw(4)
                << "p" << std::setw(10) << "C" << std::setw(10) << "C_eff" << "  nondecreasing\n";
      for (const auto& m : list_methods(filter))
        std::cout << std::left << std::setw(16) << m.name << std::right << std::setw(4) << m.stages
                  << std::setw(4) << m.order << std::fixed << std::setprecision(4) << std::setw(10) << m.C
                  << std::setw(10) << m.C_eff << "  " << (m.nondecreasing ? "true" : "false") << "\n";
      return 0;
    }
    if (methods->got_subcommand(verify)) {
      bool ok = true;
      if (verify_name == "all") {
        for (const auto& m : all_methods()) print_verify(*m, std::cout, ok);
      } else {
        print_verify(get_method(verify_name), std::cout, ok);
      }
      return ok ? 0 : 3;
    }
    if (methods->got_subcommand(exporter)) {
      const MethodRecord& m = get_method(export_name);
      if (export_out.empty()) std::cout << tableau_to_json(m.tableau).dump(2) << "\n";
      else save_tableau(m.tableau, export_out);
      return 0;
    }
    if (app.got_subcommand(radius)) {
      const bool is_file = std::filesystem::exists(radius_target);
      const ButcherTableau t = is_file ? load_tableau(radius_target) : get_method(radius_target).tableau;
      const auto r = ssp_radius(t);
      std::cout << t.name() << ": C = " << std::setprecision(12) << r.radius << " (bisection width "
                << r.bisection_width << ")\n";
      return 0;
    }
    if (app.got_subcommand(opt)) {
      const auto result = optimize_with_report(spec);
      const auto issues = verify_certificate(result.method, result.r, spec.require_nondecreasing);
      std::cout << result.method.name() << ": r = " << std::setprecision(12) << result.r << " (restart "
                << result.best_restart << " of " << spec.restarts << ")\n";
      for (const auto& issue : issues) std::cerr << "certificate: " << issue << "\n";
      const std::string text = certificate_to_json(result, spec).dump(2) + "\n";
      if (opt_out.empty()) std::cout << text;
      else write_file_atomic(opt_out, text);
      return issues.empty() ? 0 : 3;
    }
    if (app.got_subcommand(check)) {
      const auto issues = verify_certificate(nlohmann::json::parse(read_file(check_file)));
      for (const auto& issue : issues) std::cout << issue << "\n";
      if (issues.empty()) std::cout << "certificate ok\n";
      return issues.empty() ? 0 : 3;
    }
    if (app.got_subcommand(run)) {
      std::map<std::string, std::string> overrides;
      for (const auto& [flag, key] : run_flags)
        if (run->count(flag)) overrides[key] = flag_values[key];
      ExperimentConfig cfg;
      if (!config_file.empty()) {
        cfg = parse_config(read_file(config_file), experiment);
      } else {
        if (experiment.empty()) throw ConfigError("run needs an experiment name or --config");
        cfg = default_config(experiment);
      }
      apply_settings(cfg, overrides);
      return run_experiment(cfg, std::cerr);
    }
    if (app.got_subcommand(sweep)) {
      const Scheme scheme = scheme_by_name(sweep_method);
      const ProblemKind kind = parse_problem_kind(sweep_problem);
      if (kind == ProblemKind::VanDerPol) throw ConfigError("sweep needs a PDE problem (ex2, ex3 or ex4)");
      if (sweep_points < 1 || !(lmin > 0.0) || lmax < lmin) throw ConfigError("need 0 < lambda-min <= lambda-max");
      const ProblemSetup problem = make_problem(kind, sweep_a, sweep_grid, sweep_eps);
      std::vector<double> lambdas;
      for (int k = 0; k < sweep_points; ++k)
        lambdas.push_back(sweep_points == 1 ? lmin : lmin + (lmax - lmin) * k / (sweep_points - 1));
      const auto records = lambda_sweep(scheme, problem, lambdas, sweep_steps);
      std::map<std::string, std::string> meta{{"method", scheme.name},
                                              {"problem", to_string(kind)},
                                              {"a", num(sweep_a)},
                                              {"grid", std::to_string(sweep_grid)},
                                              {"steps", std::to_string(sweep_steps)},
                                              {"weno_eps", num(sweep_eps)},
                                              {"version", SSPIF_VERSION}};
      std::ostringstream key;
      for (const auto& [k, v] : meta) key << k << "=" << v << ";";
      std::uint64_t h = 1469598103934665603ULL;
      for (unsigned char ch : key.str()) {
        h ^= ch;
        h *= 1099511628211ULL;
      }
      std::ostringstream hex;
      hex << std::hex << std::setw(16) << std::setfill('0') << h;
      meta["config_hash"] = hex.str();
      const std::string text = sweep_csv(records, meta);
      if (sweep_out.empty()) std::cout << text;
      else write_file_atomic(sweep_out, text);
      int status = 0;
      for (const auto& r : records)
        if (std::isinf(r.max_rise)) {
          std::cerr << "non-finite values: method " << scheme.name << ", lambda " << num(r.lambda) << "\n";
          status = 2;
        }
      return status;
    }
  } catch (const UnknownMethod& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const NonFinite& e) {
    std::cerr << "non-finite values: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sspif
