#include "sshqfi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "sshqfi/errors.hpp"
#include "sshqfi/format.hpp"

namespace sshqfi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<PointResult> simulate_all(const std::vector<ModelParams>& points, const TimeGrid& grid,
                                      const MethodChoice& method, std::size_t workers) {
  std::vector<std::optional<PointResult>> slots(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) { slots[i] = simulate_point(points[i], grid, method); });
  std::vector<PointResult> out;
  out.reserve(points.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double max_qfi_deviation(const QfiTrace& a, const QfiTrace& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < std::min(a.f.size(), b.f.size()); ++i) dev = std::max(dev, std::abs(a.f[i] - b.f[i]));
  return dev;
}

}  // namespace

SweepAxis parse_axis(std::string_view name) {
  if (name == "dimerization") return SweepAxis::dimerization;
  if (name == "coupling") return SweepAxis::coupling;
  if (name == "detuning") return SweepAxis::detuning;
  if (name == "detuning_normalized") return SweepAxis::detuning_normalized;
  throw InvalidParameter("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::dimerization: return "dimerization";
    case SweepAxis::coupling: return "coupling";
    case SweepAxis::detuning: return "detuning";
    case SweepAxis::detuning_normalized: return "detuning_normalized";
  }
  return "unknown";
}

MethodChoice parse_method(std::string_view name, std::size_t m) {
  MethodChoice choice;
  choice.m = m;
  if (name == "auto") {
    choice.kind = MethodChoice::Kind::automatic;
  } else if (name == "exact") {
    choice.kind = MethodChoice::Kind::exact;
  } else if (name == "krylov") {
    choice.kind = MethodChoice::Kind::krylov;
  } else {
    throw InvalidParameter("unknown method '" + std::string(name) + "' (expected auto, exact or krylov)");
  }
  if (m < 1) throw InvalidParameter("Krylov dimension must be at least 1");
  return choice;
}

Method resolve_method(const MethodChoice& choice, std::size_t dim) {
  switch (choice.kind) {
    case MethodChoice::Kind::exact: return Method::exact;
    case MethodChoice::Kind::krylov: return Method::krylov;
    case MethodChoice::Kind::automatic: break;
  }
  return dim <= kAutoExactLimit ? Method::exact : Method::krylov;
}

ModelParams apply_axis(const ModelParams& base, SweepAxis axis, double value) {
  if (!std::isfinite(value)) throw InvalidParameter("sweep values must be finite");
  ModelParams p = base;
  switch (axis) {
    case SweepAxis::dimerization: p.d = value; break;
    case SweepAxis::coupling: p.g = value; break;
    case SweepAxis::detuning: p.delta = value; break;
    case SweepAxis::detuning_normalized:
      if (base.d == 0.0) throw InvalidParameter("normalized detuning is undefined at d = 0");
      p.delta = value * 2.0 * base.J * std::abs(base.d);
      break;
  }
  p.validate();
  return p;
}

std::vector<ModelParams> expand_points(const SweepConfig& config) {
  if (config.values.empty()) throw InvalidParameter("sweep needs at least one value");
  std::vector<ModelParams> points;
  points.reserve(config.values.size());
  for (double v : config.values) points.push_back(apply_axis(config.base, config.axis, v));
  return points;
}

std::vector<std::string> preflight_warnings(const std::vector<ModelParams>& points, const TimeGrid& grid) {
  std::vector<std::string> out;
  for (const auto& p : points)
    if (auto w = horizon_warning(p, grid.t_end())) out.push_back(*w);
  return out;
}

double normalized_detuning(const ModelParams& p) {
  if (p.d == 0.0) return kNaN;
  return p.delta / (2.0 * p.J * std::abs(p.d));
}

PointResult simulate_point(const ModelParams& params, const TimeGrid& grid, const MethodChoice& method) {
  params.validate();
  const HamiltonianMatrix h = build_hamiltonian(params);

  PointMeta meta;
  meta.params = params;
  meta.method = resolve_method(method, h.dim());
  meta.horizon = params.L >= 1 ? recurrence_horizon(params) : 0.0;
  if (auto w = horizon_warning(params, grid.t_end())) meta.warnings.push_back(*w);

  SpectralData spectral = meta.method == Method::exact ? eigendecompose(h)
                                                       : lanczos_spectral(h, std::min(method.m, h.dim()));
  meta.krylov_dim = spectral.krylov_dim;
  meta.breakdown = spectral.breakdown;

  AmplitudeTrace trace = survival_amplitude(spectral, grid);
  QfiTrace qfi = qfi_trace(trace);
  return {std::move(meta), std::move(spectral), std::move(trace), std::move(qfi)};
}

DiagnosticsReport diagnose(const PointResult& point, const DiagnosticsSettings& s) {
  const ModelParams& p = point.meta.params;
  DiagnosticsReport r;
  r.d = p.d;
  r.g = p.g;
  r.delta = p.delta;
  r.delta_norm = normalized_detuning(p);
  r.f_bar = late_time_average(point.qfi, s.t1, s.t2);
  r.t_eta = retention_time(point.qfi, s.eta_retention, s.T);
  r.w_eta = useful_window(point.qfi, s.eta_window, s.t_cut, s.T);

  if (auto num = numerical_bound_state(point.spectral, band_edges(p.J, p.d), s.edge_margin)) {
    r.z_bs_num = num->info.z_bs;
    r.omega_bs = num->info.omega_bs;
    r.delta_edge = num->info.delta_edge;
    r.outer_weight = num->outer_weight;
  } else {
    r.z_bs_num = r.omega_bs = r.delta_edge = kNaN;
    double outer = 0.0;
    for (const auto& e : point.spectral.pairs)
      if (std::abs(e.energy) > 2.0 * p.J + s.edge_margin) outer += e.weight;
    r.outer_weight = outer;
  }
  const auto analytic = bound_state(p.delta, p.g, p.J, p.d);
  r.z_bs_analytic = analytic ? analytic->z_bs : kNaN;

  r.eta_retention = s.eta_retention;
  r.eta_window = s.eta_window;
  r.t1 = s.t1;
  r.t2 = s.t2;
  r.t_cut = s.t_cut;
  r.T = s.T;
  return r;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  const auto points = expand_points(config);
  std::vector<std::optional<SweepRow>> slots(points.size());
  parallel_for(points.size(), config.workers, [&](std::size_t i) {
    PointResult res = simulate_point(points[i], config.grid, config.method);
    slots[i] = SweepRow{diagnose(res, config.diagnostics), std::move(res.meta)};
  });
  std::vector<SweepRow> rows;
  rows.reserve(slots.size());
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rows;
}

bool orderings_consistent(const std::vector<std::vector<double>>& series, double tie_tolerance) {
  if (series.empty()) return true;
  const std::size_t n = series.front().size();
  for (const auto& s : series)
    if (s.size() != n) throw InvalidParameter("ordering comparison needs equally long series");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool greater = false;
      bool less = false;
      for (const auto& s : series) {
        const double diff = s[i] - s[j];
        if (diff > tie_tolerance) greater = true;
        if (diff < -tie_tolerance) less = true;
      }
      if (greater && less) return false;
    }
  }
  return true;
}

RobustnessResult run_robustness(const SweepConfig& config) {
  if (config.etas.size() < 2) throw InvalidParameter("robustness needs at least two thresholds");
  if (config.windows.size() < 2) throw InvalidParameter("robustness needs at least two averaging windows");

  RobustnessResult out;
  out.points = expand_points(config);
  const auto results = simulate_all(out.points, config.grid, config.method, config.workers);

  for (double eta : config.etas) {
    std::vector<RetentionTime> row;
    for (const auto& r : results) row.push_back(retention_time(r.qfi, eta, config.diagnostics.T));
    out.retention.push_back(std::move(row));
  }
  for (const auto& w : config.windows) {
    std::vector<double> row;
    for (const auto& r : results) row.push_back(late_time_average(r.qfi, w.t1, w.t2));
    out.averages.push_back(std::move(row));
  }

  std::vector<std::vector<double>> retention_values;
  for (const auto& row : out.retention) {
    std::vector<double> v;
    for (const auto& t : row) v.push_back(t.time);
    retention_values.push_back(std::move(v));
  }
  out.retention_consistent = orderings_consistent(retention_values);
  out.average_consistent = orderings_consistent(out.averages);
  for (const auto& r : results) out.meta.push_back(r.meta);
  return out;
}

void write_robustness_csv(std::ostream& os, const SweepConfig& config, const RobustnessResult& r) {
  os << "indicator,eta,t1,t2,d,g,delta,delta_norm,value,capped,ordering_consistent\n";
  for (std::size_t e = 0; e < r.retention.size(); ++e) {
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      const auto& t = r.retention[e][i];
      os << "retention_time," << format_double(config.etas[e]) << ",nan,nan," << format_double(p.d) << ','
         << format_double(p.g) << ',' << format_double(p.delta) << ',' << format_double(normalized_detuning(p))
         << ',' << format_double(t.time) << ',' << (t.capped ? 1 : 0) << ',' << (r.retention_consistent ? 1 : 0)
         << '\n';
    }
  }
  for (std::size_t w = 0; w < r.averages.size(); ++w) {
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      os << "late_time_average,nan," << format_double(config.windows[w].t1) << ','
         << format_double(config.windows[w].t2) << ',' << format_double(p.d) << ',' << format_double(p.g) << ','
         << format_double(p.delta) << ',' << format_double(normalized_detuning(p)) << ','
         << format_double(r.averages[w][i]) << ",0," << (r.average_consistent ? 1 : 0) << '\n';
    }
  }
}

ConvergenceResult run_convergence(const ModelParams& base, const TimeGrid& grid, std::size_t m, int l_factor,
                                  std::size_t m_step, double threshold, std::size_t workers) {
  if (l_factor < 2) throw InvalidParameter("chain-length factor must be at least 2");
  if (m < 1 || m_step < 1) throw InvalidParameter("Krylov dimension and its increment must be positive");
  base.validate();

  ModelParams longer = base;
  longer.L = base.L * l_factor;
  const std::vector<ModelParams> points{base, longer, base};
  const std::vector<std::size_t> dims{m, m, m + m_step};

  std::vector<std::optional<PointResult>> slots(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    slots[i] = simulate_point(points[i], grid, MethodChoice{MethodChoice::Kind::krylov, dims[i]});
  });

  ConvergenceResult out;
  auto add = [&](const char* label, std::size_t a, std::size_t b) {
    const double dev = max_qfi_deviation(slots[a]->qfi, slots[b]->qfi);
    const bool pass = dev < threshold;
    out.checks.push_back({label, points[a].L, slots[a]->meta.krylov_dim, points[b].L, slots[b]->meta.krylov_dim,
                          dev, threshold, pass});
    out.pass = out.pass && pass;
  };
  add("chain_length", 0, 1);
  add("krylov_dimension", 0, 2);
  for (auto& s : slots) {
    for (const auto& w : s->meta.warnings)
      if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    out.meta.push_back(s->meta);
  }
  return out;
}

void write_convergence_csv(std::ostream& os, const ConvergenceResult& r) {
  os << "check,L_a,m_a,L_b,m_b,max_deviation,threshold,pass\n";
  for (const auto& c : r.checks)
    os << c.label << ',' << c.L_a << ',' << c.m_a << ',' << c.L_b << ',' << c.m_b << ','
       << format_double(c.max_deviation) << ',' << format_double(c.threshold) << ',' << (c.pass ? 1 : 0) << '\n';
}

std::vector<BoundStateScanRow> run_bound_state_scan(const SweepConfig& config) {
  const auto points = expand_points(config);
  std::vector<std::optional<BoundStateScanRow>> slots(points.size());
  parallel_for(points.size(), config.workers, [&](std::size_t i) {
    const auto& p = points[i];
    PointResult res = simulate_point(p, config.grid, config.method);
    BoundStateScanRow row{p, bound_state(p.delta, p.g, p.J, p.d),
                          numerical_bound_state(res.spectral, band_edges(p.J, p.d), config.diagnostics.edge_margin),
                          late_time_average(res.qfi, config.diagnostics.t1, config.diagnostics.t2), res.meta};
    slots[i] = std::move(row);
  });
  std::vector<BoundStateScanRow> rows;
  rows.reserve(slots.size());
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rows;
}

void write_bound_state_csv(std::ostream& os, const std::vector<BoundStateScanRow>& rows) {
  os << "d,g,delta,delta_norm,omega_bs_analytic,z_bs_analytic,f_bs_analytic,delta_edge_analytic,e_bs_num,z_bs_num,"
        "delta_edge_num,outer_weight,in_gap_states,f_bar\n";
  for (const auto& r : rows) {
    const auto& a = r.analytic;
    const auto& n = r.numerical;
    os << format_double(r.params.d) << ',' << format_double(r.params.g) << ',' << format_double(r.params.delta)
       << ',' << format_double(normalized_detuning(r.params)) << ',' << format_double(a ? a->omega_bs : kNaN)
       << ',' << format_double(a ? a->z_bs : kNaN) << ',' << format_double(a ? a->f_bs : kNaN) << ','
       << format_double(a ? a->delta_edge : kNaN) << ',' << format_double(n ? n->info.omega_bs : kNaN) << ','
       << format_double(n ? n->info.z_bs : kNaN) << ',' << format_double(n ? n->info.delta_edge : kNaN) << ','
       << format_double(n ? n->outer_weight : kNaN) << ',' << (n ? n->in_gap_states : 0) << ','
       << format_double(r.f_bar) << '\n';
  }
}

}  // namespace sshqfi
