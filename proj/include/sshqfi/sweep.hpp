#pragma once

// Batch drivers behind the command-line tool: single-point simulation,
// parameter sweeps, robustness tables, convergence checks and bound-state scans.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sshqfi/dynamics.hpp"
#include "sshqfi/greens.hpp"
#include "sshqfi/lattice.hpp"
#include "sshqfi/metrology.hpp"

namespace sshqfi {

enum class SweepAxis { dimerization, coupling, detuning, detuning_normalized };

SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

/// Exact diagonalization is chosen automatically up to this dimension.
inline constexpr std::size_t kAutoExactLimit = 1200;

struct MethodChoice {
  enum class Kind { automatic, exact, krylov };
  Kind kind = Kind::automatic;
  std::size_t m = 350;
};

MethodChoice parse_method(std::string_view name, std::size_t m);
Method resolve_method(const MethodChoice& choice, std::size_t dim);

struct Window {
  double t1;
  double t2;
};

struct DiagnosticsSettings {
  double eta_retention = 0.2;
  double eta_window = 0.4;
  double t1 = 40.0;
  double t2 = 100.0;
  double t_cut = 20.0;
  double T = 100.0;  // observation horizon, also the retention-time cap
  double edge_margin = kDefaultEdgeMargin;
};

struct SweepConfig {
  ModelParams base;
  SweepAxis axis = SweepAxis::detuning;
  std::vector<double> values;
  TimeGrid grid{0.0, 100.0, 2000};
  DiagnosticsSettings diagnostics;
  std::vector<double> etas;       // robustness thresholds
  std::vector<Window> windows;    // robustness averaging windows
  MethodChoice method;
  std::size_t workers = 1;
};

/// Per-point run metadata.
struct PointMeta {
  ModelParams params;
  Method method = Method::exact;
  std::size_t krylov_dim = 0;
  bool breakdown = false;
  double horizon = 0.0;  // recurrence horizon, 0 for L = 0
  std::vector<std::string> warnings;
};

struct PointResult {
  PointMeta meta;
  SpectralData spectral;
  AmplitudeTrace trace;
  QfiTrace qfi;
};

/// Returns base with the swept quantity replaced. Normalized detuning is
/// converted through delta = value * 2J|d|; throws InvalidParameter for d = 0.
ModelParams apply_axis(const ModelParams& base, SweepAxis axis, double value);

std::vector<ModelParams> expand_points(const SweepConfig& config);

/// Horizon warnings for every point of the config, without simulating.
std::vector<std::string> preflight_warnings(const std::vector<ModelParams>& points, const TimeGrid& grid);

PointResult simulate_point(const ModelParams& params, const TimeGrid& grid, const MethodChoice& method);

DiagnosticsReport diagnose(const PointResult& point, const DiagnosticsSettings& settings);

/// delta / (2J|d|), nan when d = 0.
double normalized_detuning(const ModelParams& p);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; results must be written to index-owned slots.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn);

struct SweepRow {
  DiagnosticsReport report;
  PointMeta meta;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// True when no pair of points is ordered one way by one series and the
/// opposite way by another. Differences within tie_tolerance count as ties.
bool orderings_consistent(const std::vector<std::vector<double>>& series, double tie_tolerance = 1e-9);

struct RobustnessResult {
  std::vector<ModelParams> points;
  std::vector<std::vector<RetentionTime>> retention;  // [eta][point]
  std::vector<std::vector<double>> averages;          // [window][point]
  bool retention_consistent = true;
  bool average_consistent = true;
  std::vector<PointMeta> meta;
};

RobustnessResult run_robustness(const SweepConfig& config);

void write_robustness_csv(std::ostream& os, const SweepConfig& config, const RobustnessResult& result);

struct ConvergenceCheck {
  std::string label;
  int L_a;
  std::size_t m_a;
  int L_b;
  std::size_t m_b;
  double max_deviation;
  double threshold;
  bool pass;
};

struct ConvergenceResult {
  std::vector<ConvergenceCheck> checks;
  std::vector<std::string> warnings;
  std::vector<PointMeta> meta;
  bool pass = true;
};

/// Compares max_t |F(t)| differences between (L, m) and (factor L, m), and
/// between (L, m) and (L, m + m_step), all with Lanczos propagation.
ConvergenceResult run_convergence(const ModelParams& base, const TimeGrid& grid, std::size_t m, int l_factor,
                                  std::size_t m_step, double threshold, std::size_t workers);

void write_convergence_csv(std::ostream& os, const ConvergenceResult& result);

struct BoundStateScanRow {
  ModelParams params;
  std::optional<BoundStateInfo> analytic;
  std::optional<NumericalBoundState> numerical;
  double f_bar;
  PointMeta meta;
};

std::vector<BoundStateScanRow> run_bound_state_scan(const SweepConfig& config);

void write_bound_state_csv(std::ostream& os, const std::vector<BoundStateScanRow>& rows);

}  // namespace sshqfi

#include "sshqfi/detail/parallel.hpp"
