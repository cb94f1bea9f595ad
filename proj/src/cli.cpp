#include "sshqfi/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sshqfi/errors.hpp"
#include "sshqfi/format.hpp"
#include "sshqfi/sweep.hpp"

namespace sshqfi {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::size_t default_workers() {
  if (const char* env = std::getenv("SSHQFI_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid SSHQFI_WORKERS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct CommonOptions {
  double J = 1.0;
  std::vector<double> d{0.3};
  std::vector<double> g{0.4};
  std::vector<double> delta{0.0};
  int L = 500;
  std::string method = "auto";
  std::size_t m = 350;
  double tmax = 100.0;
  double dt = 0.05;
  double t1 = 40.0;
  double t2 = 100.0;
  double eta = 0.2;
  double eta_window = 0.4;
  double tcut = 20.0;
  std::string out;
  std::size_t workers = 1;
  bool strict = false;
  std::string config;
};

struct AxisOptions {
  std::string axis = "detuning";
  std::vector<double> values;
  std::vector<double> range;  // start, stop, count
};

void add_common(CLI::App* sub, CommonOptions& o, bool multi_point) {
  sub->add_option("--config", o.config, "Flat key = value file; command-line flags take precedence");
  sub->add_option("--J", o.J, "Hopping scale J")->capture_default_str();
  const char* list_note = multi_point ? " (comma-separated list allowed)" : "";
  sub->add_option("--d", o.d, std::string("Dimerization") + list_note)->delimiter(',')->capture_default_str();
  sub->add_option("--g", o.g, std::string("Emitter-bath coupling") + list_note)->delimiter(',')->capture_default_str();
  sub->add_option("--delta", o.delta, std::string("Emitter detuning") + list_note)
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--L", o.L, "Chain half-length (2L+1 unit cells)")->capture_default_str();
  sub->add_option("--method", o.method, "auto, exact or krylov")->capture_default_str();
  sub->add_option("--m", o.m, "Krylov dimension")->capture_default_str();
  sub->add_option("--tmax", o.tmax, "End of the time grid, also the observation horizon T")->capture_default_str();
  sub->add_option("--dt", o.dt, "Time step")->capture_default_str();
  sub->add_option("--t1", o.t1, "Start of the late-time averaging window")->capture_default_str();
  sub->add_option("--t2", o.t2, "End of the late-time averaging window")->capture_default_str();
  sub->add_option("--eta", o.eta, "Retention-time threshold")->capture_default_str();
  sub->add_option("--eta-window", o.eta_window, "Useful-window threshold")->capture_default_str();
  sub->add_option("--tcut", o.tcut, "Post-transient cutoff for the useful window")->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path")->capture_default_str();
  sub->add_option("--workers", o.workers, "Concurrent sweep points (default $SSHQFI_WORKERS)")->capture_default_str();
  sub->add_flag("--strict", o.strict, "Exit with code 3 when the recurrence horizon is exceeded");
}

void add_axis(CLI::App* sub, AxisOptions& a) {
  sub->add_option("--axis", a.axis, "dimerization, coupling, detuning or detuning_normalized")->capture_default_str();
  sub->add_option("--values", a.values, "Comma-separated swept values")->delimiter(',');
  sub->add_option("--range", a.range, "start,stop,count (inclusive linear grid)")->delimiter(',')->expected(3);
}

double single(const std::vector<double>& v, const char* name) {
  if (v.size() != 1) throw InvalidParameter(std::string("--") + name + " takes a single value for this command");
  return v.front();
}

ModelParams base_params(const CommonOptions& o) {
  ModelParams p{o.J, single(o.d, "d"), single(o.g, "g"), single(o.delta, "delta"), o.L};
  p.validate();
  return p;
}

DiagnosticsSettings diagnostics_from(const CommonOptions& o) {
  DiagnosticsSettings s;
  s.eta_retention = o.eta;
  s.eta_window = o.eta_window;
  s.t1 = o.t1;
  s.t2 = o.t2;
  s.t_cut = o.tcut;
  s.T = o.tmax;
  if (!(o.eta > 0.0 && o.eta < 1.0)) throw InvalidParameter("--eta must lie in (0, 1)");
  if (!(o.tcut < o.tmax)) throw InvalidParameter("--tcut must be smaller than --tmax");
  return s;
}

std::vector<double> axis_values(const AxisOptions& a) {
  std::vector<double> values = a.values;
  if (!a.range.empty()) {
    const double count = a.range[2];
    if (count < 1 || count != std::floor(count)) throw InvalidParameter("--range count must be a positive integer");
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i)
      values.push_back(n == 1 ? a.range[0]
                              : a.range[0] + (a.range[1] - a.range[0]) * static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
  }
  if (values.empty()) throw InvalidParameter("no sweep values given (use --values or --range)");
  return values;
}

SweepConfig sweep_config(const CommonOptions& o, const AxisOptions& a) {
  SweepConfig c;
  c.base = base_params(o);
  c.axis = parse_axis(a.axis);
  c.values = axis_values(a);
  c.grid = TimeGrid::with_spacing(0.0, o.tmax, o.dt);
  c.diagnostics = diagnostics_from(o);
  c.method = parse_method(o.method, o.m);
  c.workers = o.workers;
  return c;
}

fs::path output_path(const CommonOptions& o, const char* command) {
  return o.out.empty() ? fs::path(std::string(command) + ".csv") : fs::path(o.out);
}

fs::path meta_path(const fs::path& out) {
  fs::path p = out;
  if (p.extension() == ".csv") p.replace_extension();
  return p.string() + ".meta.json";
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidParameter("cannot open output file " + path.string());
  return os;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json params_json(const ModelParams& p) {
  return {{"J", p.J}, {"d", p.d}, {"g", p.g}, {"delta", p.delta}, {"L", p.L}, {"dim", p.dimension()}};
}

json point_json(const PointMeta& m) {
  json j = params_json(m.params);
  j["method"] = m.method == Method::exact ? "exact" : "krylov";
  j["krylov_dim"] = m.krylov_dim;
  j["lanczos_breakdown"] = m.breakdown;
  j["recurrence_horizon"] = number(m.horizon);
  j["warnings"] = m.warnings;
  return j;
}

json options_json(const CommonOptions& o) {
  return {{"J", o.J},       {"d", o.d},         {"g", o.g},         {"delta", o.delta},
          {"L", o.L},       {"method", o.method}, {"m", o.m},       {"tmax", o.tmax},
          {"dt", o.dt},     {"t1", o.t1},       {"t2", o.t2},       {"eta", o.eta},
          {"eta_window", o.eta_window},         {"tcut", o.tcut},   {"workers", o.workers},
          {"strict", o.strict}};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_metadata(const fs::path& out, const char* command, json parameters, const std::vector<PointMeta>& points,
                    const Stopwatch& clock, json extra = json::object()) {
  json meta;
  meta["tool"] = "sshqfi";
  meta["version"] = kToolVersion;
  meta["command"] = command;
  meta["parameters"] = std::move(parameters);
  double horizon = std::numeric_limits<double>::infinity();
  bool breakdown = false;
  json pts = json::array();
  for (const auto& p : points) {
    horizon = std::min(horizon, p.horizon);
    breakdown = breakdown || p.breakdown;
    pts.push_back(point_json(p));
  }
  meta["recurrence_horizon"] = number(horizon);
  meta["lanczos_breakdown"] = breakdown;
  meta["points"] = std::move(pts);
  for (auto& [k, v] : extra.items()) meta[k] = v;
  meta["wall_clock_seconds"] = clock.seconds();
  auto os = open_output(meta_path(out));
  os << meta.dump(2) << '\n';
}

// Prints horizon warnings; returns true when --strict should abort.
bool report_warnings(const std::vector<std::string>& warnings, bool strict) {
  for (const auto& w : warnings) std::cerr << (strict ? "error: " : "warning: ") << w << '\n';
  return strict && !warnings.empty();
}

std::string point_label(const ModelParams& p) {
  return "_d" + format_double(p.d) + "_g" + format_double(p.g) + "_delta" + format_double(p.delta);
}

int cmd_trace(const CommonOptions& o) {
  Stopwatch clock;
  const TimeGrid grid = TimeGrid::with_spacing(0.0, o.tmax, o.dt);
  const MethodChoice method = parse_method(o.method, o.m);
  std::vector<ModelParams> points;
  for (double d : o.d)
    for (double g : o.g)
      for (double delta : o.delta) {
        ModelParams p{o.J, d, g, delta, o.L};
        p.validate();
        points.push_back(p);
      }
  if (points.empty()) throw InvalidParameter("no parameter points given");
  if (report_warnings(preflight_warnings(points, grid), o.strict)) return kExitPhysicsGuard;

  std::vector<std::optional<PointResult>> results(points.size());
  parallel_for(points.size(), o.workers, [&](std::size_t i) { results[i] = simulate_point(points[i], grid, method); });

  const fs::path out = output_path(o, "trace");
  std::vector<PointMeta> metas;
  json files = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    fs::path path = out;
    if (points.size() > 1) {
      path = out.parent_path() / (out.stem().string() + point_label(points[i]) + out.extension().string());
    }
    auto os = open_output(path);
    write_trace_csv(os, results[i]->trace);
    metas.push_back(results[i]->meta);
    files.push_back(path.string());
  }
  write_metadata(out, "trace", options_json(o), metas, clock, {{"files", files}});
  return kExitSuccess;
}

int cmd_sweep(const CommonOptions& o, const AxisOptions& a) {
  Stopwatch clock;
  const SweepConfig config = sweep_config(o, a);
  if (report_warnings(preflight_warnings(expand_points(config), config.grid), o.strict)) return kExitPhysicsGuard;

  const auto rows = run_sweep(config);
  const fs::path out = output_path(o, "sweep");
  auto os = open_output(out);
  write_diagnostics_header(os);
  std::vector<PointMeta> metas;
  for (const auto& r : rows) {
    write_diagnostics_row(os, r.report);
    metas.push_back(r.meta);
  }
  json params = options_json(o);
  params["axis"] = a.axis;
  params["values"] = config.values;
  write_metadata(out, "sweep", params, metas, clock);
  return kExitSuccess;
}

std::vector<Window> parse_windows(const std::vector<std::string>& specs) {
  std::vector<Window> out;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InvalidParameter("window '" + s + "' must look like t1:t2");
    try {
      out.push_back({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw InvalidParameter("window '" + s + "' must look like t1:t2");
    }
  }
  return out;
}

int cmd_robustness(const CommonOptions& o, const AxisOptions& a, const std::vector<double>& etas,
                   const std::vector<std::string>& windows) {
  Stopwatch clock;
  SweepConfig config = sweep_config(o, a);
  config.etas = etas;
  config.windows = parse_windows(windows);
  if (report_warnings(preflight_warnings(expand_points(config), config.grid), o.strict)) return kExitPhysicsGuard;

  const auto result = run_robustness(config);
  const fs::path out = output_path(o, "robustness");
  auto os = open_output(out);
  write_robustness_csv(os, config, result);
  std::cout << "retention-time ordering consistent: " << (result.retention_consistent ? "true" : "false") << '\n'
            << "late-time-average ordering consistent: " << (result.average_consistent ? "true" : "false") << '\n';

  json params = options_json(o);
  params["axis"] = a.axis;
  params["values"] = config.values;
  params["etas"] = etas;
  params["windows"] = windows;
  write_metadata(out, "robustness", params, result.meta, clock,
                 {{"retention_ordering_consistent", result.retention_consistent},
                  {"average_ordering_consistent", result.average_consistent}});
  return kExitSuccess;
}

int cmd_convergence(const CommonOptions& o, int l_factor, std::size_t m_step, double threshold) {
  Stopwatch clock;
  const ModelParams base = base_params(o);
  const TimeGrid grid = TimeGrid::with_spacing(0.0, o.tmax, o.dt);
  const bool abort = report_warnings(preflight_warnings({base}, grid), o.strict);
  if (abort) return kExitPhysicsGuard;

  const auto result = run_convergence(base, grid, o.m, l_factor, m_step, threshold, o.workers);
  const fs::path out = output_path(o, "convergence");
  auto os = open_output(out);
  write_convergence_csv(os, result);
  for (const auto& c : result.checks)
    std::cout << c.label << ": max |dF| = " << format_double(c.max_deviation) << (c.pass ? "  PASS" : "  FAIL")
              << '\n';
  std::cout << "convergence " << (result.pass ? "PASS" : "FAIL") << '\n';

  json params = options_json(o);
  params["l_factor"] = l_factor;
  params["m_step"] = m_step;
  params["threshold"] = threshold;
  write_metadata(out, "convergence", params, result.meta, clock, {{"pass", result.pass}});
  if (!result.pass && o.strict) return kExitPhysicsGuard;
  return kExitSuccess;
}

int cmd_bound_state_scan(const CommonOptions& o, const AxisOptions& a, double edge_margin) {
  Stopwatch clock;
  SweepConfig config = sweep_config(o, a);
  config.diagnostics.edge_margin = edge_margin;
  if (report_warnings(preflight_warnings(expand_points(config), config.grid), o.strict)) return kExitPhysicsGuard;

  const auto rows = run_bound_state_scan(config);
  const fs::path out = output_path(o, "bound_state_scan");
  auto os = open_output(out);
  write_bound_state_csv(os, rows);
  std::vector<PointMeta> metas;
  for (const auto& r : rows) metas.push_back(r.meta);
  json params = options_json(o);
  params["axis"] = a.axis;
  params["values"] = config.values;
  params["edge_margin"] = edge_margin;
  write_metadata(out, "bound-state-scan", params, metas, clock);
  return kExitSuccess;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out = s.substr(first, last - first + 1);
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front())
    out = out.substr(1, out.size() - 2);
  return out;
}

// Fills options that were not given on the command line from a flat
// `key = value` file. Lines starting with '#' or ';' are comments.
void apply_config_file(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot read config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';' || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw InvalidParameter(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key == "config") throw InvalidParameter(path + ": nested config files are not supported");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InvalidParameter(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InvalidParameter(path + ":" + std::to_string(line_no) + ": bad value for '" + key + "': " + e.what());
    }
  }
}

std::vector<double> default_detuning_grid() {
  std::vector<double> v;
  for (int i = 0; i <= 26; ++i) v.push_back(0.05 * i);
  return v;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Phase-QFI of a quantum emitter coupled to a bosonic SSH chain", "sshqfi"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  const std::size_t workers = default_workers();

  CommonOptions trace_opts;
  trace_opts.workers = workers;
  auto* trace = app.add_subcommand("trace", "Survival amplitude and phase-QFI time traces");
  add_common(trace, trace_opts, true);

  CommonOptions sweep_opts;
  sweep_opts.workers = workers;
  AxisOptions sweep_axis;
  auto* sweep = app.add_subcommand("sweep", "Late-time diagnostics along one parameter axis");
  add_common(sweep, sweep_opts, false);
  add_axis(sweep, sweep_axis);

  CommonOptions rob_opts;
  rob_opts.workers = workers;
  rob_opts.L = 520;
  rob_opts.m = 360;
  AxisOptions rob_axis{"detuning_normalized", default_detuning_grid(), {}};
  std::vector<double> etas{0.15, 0.2, 0.25};
  std::vector<std::string> windows{"30:90", "40:100", "50:100"};
  auto* robustness = app.add_subcommand("robustness", "Ordering stability of the indicators across thresholds/windows");
  add_common(robustness, rob_opts, false);
  add_axis(robustness, rob_axis);
  robustness->add_option("--etas", etas, "Retention thresholds")->delimiter(',')->capture_default_str();
  robustness->add_option("--windows", windows, "Averaging windows t1:t2")->delimiter(',')->capture_default_str();

  CommonOptions conv_opts;
  conv_opts.workers = workers;
  conv_opts.L = 250;
  conv_opts.m = 300;
  int l_factor = 2;
  std::size_t m_step = 50;
  double threshold = 1e-6;
  auto* convergence = app.add_subcommand("convergence", "Chain-length and Krylov-dimension convergence check");
  add_common(convergence, conv_opts, false);
  convergence->add_option("--l-factor", l_factor, "Chain-length multiplier")->capture_default_str();
  convergence->add_option("--m-step", m_step, "Krylov-dimension increment")->capture_default_str();
  convergence->add_option("--threshold", threshold, "Pass threshold on max |dF|")->capture_default_str();

  CommonOptions scan_opts;
  scan_opts.workers = workers;
  scan_opts.L = 220;
  AxisOptions scan_axis{"detuning_normalized", default_detuning_grid(), {}};
  double edge_margin = kDefaultEdgeMargin;
  auto* scan = app.add_subcommand("bound-state-scan", "Numerical and analytic in-gap bound state versus detuning");
  add_common(scan, scan_opts, false);
  add_axis(scan, scan_axis);
  scan->add_option("--edge-margin", edge_margin, "In-gap classification margin")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    apply_config_file(trace, trace_opts.config);
    apply_config_file(sweep, sweep_opts.config);
    apply_config_file(robustness, rob_opts.config);
    apply_config_file(convergence, conv_opts.config);
    apply_config_file(scan, scan_opts.config);

    // A range given without explicit values replaces the default detuning grid.
    auto explicit_axis = [](CLI::App* sub, AxisOptions& a) {
      if (sub->count("--range") > 0 && sub->count("--values") == 0) a.values.clear();
    };
    explicit_axis(robustness, rob_axis);
    explicit_axis(scan, scan_axis);

    if (*trace) return cmd_trace(trace_opts);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_axis);
    if (*robustness) return cmd_robustness(rob_opts, rob_axis, etas, windows);
    if (*convergence) return cmd_convergence(conv_opts, l_factor, m_step, threshold);
    if (*scan) return cmd_bound_state_scan(scan_opts, scan_axis, edge_margin);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const DimensionGuard& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
  return kExitInvalidInput;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("sshqfi");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sshqfi
