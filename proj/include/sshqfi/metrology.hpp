#pragma once

// Phase-QFI F(t) = |u(t)|^2 and the late-time operational indicators built on
// it, plus extraction of the in-gap bound state from a finite-chain spectrum.

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sshqfi/dynamics.hpp"
#include "sshqfi/greens.hpp"
#include "sshqfi/lattice.hpp"

namespace sshqfi {

struct QfiTrace {
  TimeGrid grid;
  std::vector<double> f;
};

QfiTrace qfi_trace(const AmplitudeTrace& trace);

/// Emitter state after encoding phase phi on (|g> + e^{i phi}|e>)/sqrt 2 and
/// evolving with survival amplitude u. Bloch components follow
/// r = (Re[u e^{i phi}], Im[u e^{i phi}], |u|^2 - 1).
struct ReducedState {
  std::complex<double> u;
  double phi;
  std::array<double, 3> bloch;

  /// rho in the ordered basis {|g>, |e>}.
  std::array<std::array<std::complex<double>, 2>, 2> density_matrix() const;
  /// d r / d phi = (-r_y, r_x, 0).
  std::array<double, 3> bloch_phase_derivative() const;
  /// |d r / d phi|^2.
  double qfi() const;
  /// Rotation of the optimal equatorial measurement basis, arg(u) + phi: the
  /// Bloch vector points along this azimuth and the measured axis sits a
  /// quarter turn ahead, where the classical Fisher information equals qfi().
  double optimal_measurement_angle() const;
};

/// Throws DomainError if |u| > 1 + 1e-9.
ReducedState reduced_state(std::complex<double> u, double phi);

/// Time average of F over [t1, t2]: trapezoidal rule on the linear interpolant.
/// Throws RangeError when the grid does not cover the window.
double late_time_average(const QfiTrace& f, double t1, double t2);

/// The same average evaluated in closed form from the spectrum:
/// sum_ab w_a w_b (sin(w_ab t2) - sin(w_ab t1)) / (w_ab (t2 - t1)).
double late_time_average_spectral(const SpectralData& spec, double t1, double t2);

struct RetentionTime {
  double time;  // t_max when capped
  bool capped;  // threshold never crossed before t_max
};

/// First time F drops below eta, linearly interpolated within the bracketing
/// interval.
RetentionTime retention_time(const QfiTrace& f, double eta, double t_max);

/// Measure of {t in [t_cut, T] : F(t) >= eta} for the linear interpolant of F.
double useful_window(const QfiTrace& f, double eta, double t_cut, double T);

inline constexpr double kDefaultEdgeMargin = 1e-9;

struct NumericalBoundState {
  BoundStateInfo info;          // energy of the max-weight in-gap state, total in-gap weight
  double outer_weight;          // emitter weight beyond the outer band edges
  std::size_t in_gap_states;
};

/// Classifies |E| < 2J|d| - margin as in-gap. Empty when nothing falls in the
/// gap (including d = 0).
std::optional<NumericalBoundState> numerical_bound_state(const SpectralData& spec, const BandStructure& bands,
                                                         double edge_margin = kDefaultEdgeMargin);

struct DiagnosticsReport {
  double d = 0.0;
  double g = 0.0;
  double delta = 0.0;
  double delta_norm = 0.0;  // nan when d = 0
  double f_bar = 0.0;
  RetentionTime t_eta{0.0, false};
  double w_eta = 0.0;
  double z_bs_num = 0.0;       // nan without an in-gap state
  double z_bs_analytic = 0.0;  // nan without a pole
  double omega_bs = 0.0;       // numerical in-gap energy, nan when absent
  double delta_edge = 0.0;     // numerical, nan when absent
  double outer_weight = 0.0;

  // echoed settings
  double eta_retention = 0.2;
  double eta_window = 0.4;
  double t1 = 40.0;
  double t2 = 100.0;
  double t_cut = 20.0;
  double T = 100.0;
};

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsReport& r);

}  // namespace sshqfi
