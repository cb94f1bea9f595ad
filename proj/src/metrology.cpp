#include "sshqfi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sshqfi/errors.hpp"
#include "sshqfi/format.hpp"

namespace sshqfi {
namespace {

double coverage_slack(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

void require_window(const TimeGrid& grid, double a, double b, const char* what) {
  if (!(b > a)) throw RangeError(std::string(what) + ": window end must exceed its start");
  if (a < grid.t_start() - coverage_slack(a) || b > grid.t_end() + coverage_slack(b))
    throw RangeError(std::string(what) + ": window [" + format_double(a) + ", " + format_double(b) +
                     "] not covered by the time grid [" + format_double(grid.t_start()) + ", " +
                     format_double(grid.t_end()) + "]");
}

double lerp_at(double ta, double fa, double tb, double fb, double t) {
  if (tb == ta) return fa;
  return fa + (fb - fa) * (t - ta) / (tb - ta);
}

// Calls visit(a, fa, b, fb) for each piece of the linear interpolant of f
// restricted to [lo, hi].
template <class Visit>
void for_each_piece(const QfiTrace& f, double lo, double hi, Visit&& visit) {
  const auto& grid = f.grid;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t0 = grid[i];
    const double t1 = grid[i + 1];
    if (t1 <= lo || t0 >= hi) continue;
    const double a = std::max(t0, lo);
    const double b = std::min(t1, hi);
    if (b <= a) continue;
    visit(a, lerp_at(t0, f.f[i], t1, f.f[i + 1], a), b, lerp_at(t0, f.f[i], t1, f.f[i + 1], b));
  }
}

}  // namespace

QfiTrace qfi_trace(const AmplitudeTrace& trace) {
  QfiTrace out{trace.grid, {}};
  out.f.reserve(trace.u.size());
  for (const auto& u : trace.u) out.f.push_back(std::norm(u));
  return out;
}

std::array<std::array<std::complex<double>, 2>, 2> ReducedState::density_matrix() const {
  const double p = std::norm(u);
  const auto coherence = u * std::polar(1.0, phi) / 2.0;
  return {{{1.0 - p / 2.0, std::conj(coherence)}, {coherence, p / 2.0}}};
}

std::array<double, 3> ReducedState::bloch_phase_derivative() const { return {-bloch[1], bloch[0], 0.0}; }

double ReducedState::qfi() const {
  const auto dr = bloch_phase_derivative();
  return dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2];
}

double ReducedState::optimal_measurement_angle() const { return std::arg(u) + phi; }

ReducedState reduced_state(std::complex<double> u, double phi) {
  if (!(std::abs(u) <= 1.0 + 1e-9)) throw DomainError("survival amplitude modulus exceeds 1");
  const auto rotated = u * std::polar(1.0, phi);
  return {u, phi, {rotated.real(), rotated.imag(), std::norm(u) - 1.0}};
}

double late_time_average(const QfiTrace& f, double t1, double t2) {
  require_window(f.grid, t1, t2, "late-time average");
  double integral = 0.0;
  for_each_piece(f, t1, t2, [&](double a, double fa, double b, double fb) { integral += 0.5 * (b - a) * (fa + fb); });
  return integral / (t2 - t1);
}

double late_time_average_spectral(const SpectralData& spec, double t1, double t2) {
  if (!(t2 > t1)) throw RangeError("late-time average: window end must exceed its start");
  const double mid = 0.5 * (t1 + t2);
  const double half = 0.5 * (t2 - t1);
  auto kernel = [&](double w) {
    const double x = w * half;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
    return std::cos(w * mid) * sinc;
  };
  const auto& p = spec.pairs;
  double sum = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    sum += p[a].weight * p[a].weight;
    double cross = 0.0;
    for (std::size_t b = a + 1; b < p.size(); ++b) cross += p[b].weight * kernel(p[a].energy - p[b].energy);
    sum += 2.0 * p[a].weight * cross;
  }
  return sum;
}

RetentionTime retention_time(const QfiTrace& f, double eta, double t_max) {
  const auto& grid = f.grid;
  for (std::size_t i = 0; i < grid.size() && grid[i] <= t_max; ++i) {
    if (f.f[i] >= eta) continue;
    if (i == 0) return {grid[0], false};
    const double ta = grid[i - 1];
    const double fa = f.f[i - 1];
    const double crossing = ta + (fa - eta) / (fa - f.f[i]) * (grid[i] - ta);
    if (crossing > t_max) break;
    return {crossing, false};
  }
  return {t_max, true};
}

double useful_window(const QfiTrace& f, double eta, double t_cut, double T) {
  require_window(f.grid, t_cut, T, "useful window");
  double total = 0.0;
  for_each_piece(f, t_cut, T, [&](double a, double fa, double b, double fb) {
    const bool above_a = fa >= eta;
    const bool above_b = fb >= eta;
    if (above_a && above_b) {
      total += b - a;
    } else if (above_a != above_b) {
      const double s = a + (eta - fa) / (fb - fa) * (b - a);
      total += above_a ? s - a : b - s;
    }
  });
  return std::min(total, T - t_cut);
}

std::optional<NumericalBoundState> numerical_bound_state(const SpectralData& spec, const BandStructure& bands,
                                                         double edge_margin) {
  const double limit = bands.inner_edge - edge_margin;
  if (bands.gap_width == 0.0 || limit <= 0.0) return std::nullopt;

  double z = 0.0;
  double best_weight = -1.0;
  double best_energy = 0.0;
  double outer = 0.0;
  std::size_t count = 0;
  for (const auto& p : spec.pairs) {
    if (std::abs(p.energy) < limit) {
      z += p.weight;
      ++count;
      if (p.weight > best_weight) {
        best_weight = p.weight;
        best_energy = p.energy;
      }
    } else if (std::abs(p.energy) > bands.outer_edge + edge_margin) {
      outer += p.weight;
    }
  }
  if (count == 0) return std::nullopt;
  const BoundStateInfo info{best_energy, z, bands.inner_edge - std::abs(best_energy), z * z};
  return NumericalBoundState{info, outer, count};
}

void write_diagnostics_header(std::ostream& os) {
  os << "d,g,delta,delta_norm,f_bar,t_eta,t_eta_capped,w_eta,z_bs_num,z_bs_analytic,omega_bs,delta_edge,"
        "outer_weight\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsReport& r) {
  os << format_double(r.d) << ',' << format_double(r.g) << ',' << format_double(r.delta) << ','
     << format_double(r.delta_norm) << ',' << format_double(r.f_bar) << ',' << format_double(r.t_eta.time) << ','
     << (r.t_eta.capped ? 1 : 0) << ',' << format_double(r.w_eta) << ',' << format_double(r.z_bs_num) << ','
     << format_double(r.z_bs_analytic) << ',' << format_double(r.omega_bs) << ',' << format_double(r.delta_edge)
     << ',' << format_double(r.outer_weight) << '\n';
}

}  // namespace sshqfi
