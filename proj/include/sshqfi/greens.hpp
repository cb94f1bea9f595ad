#pragma once

// Local A-site Green's function of the bare infinite SSH chain inside the
// central gap, the Dyson pole of the emitter propagator, and its residue.

#include <complex>
#include <cstddef>
#include <optional>

namespace sshqfi {

struct BoundStateInfo {
  double omega_bs;    // pole energy
  double z_bs;        // emitter residue
  double delta_edge;  // 2J|d| - |omega_bs|
  double f_bs;        // z_bs^2, the retained phase-QFI benchmark
};

/// Closed form -w / sqrt((4J^2 - w^2)(4J^2 d^2 - w^2)) for |w| < 2J|d|.
/// Throws DomainError outside the open gap or for d = 0.
double ga0(double omega, double J, double d);

/// d ga0 / d omega. Same domain as ga0.
double ga0_derivative(double omega, double J, double d);

/// Trapezoidal k-integral of (w + i eta) / ((w + i eta)^2 - omega_+(k)^2)
/// over [-pi, pi] with n_k intervals, divided by 2 pi.
std::complex<double> ga0_quadrature(double omega, double J, double d, double eta, std::size_t n_k);

/// eta -> 0+ limit of ga0_quadrature by Richardson extrapolation over
/// eta = 1e-3, 1e-4, 1e-5 (real part in even powers, imaginary part in odd powers). The
/// even/odd split assumes omega lies off the band.
std::complex<double> ga0_quadrature_limit(double omega, double J, double d, std::size_t n_k = 20000);

/// Unique in-gap root of w - delta - g^2 ga0(w) = 0, found by bisection.
/// Empty when there is no gap, or when g = 0 and |delta| >= 2J|d|.
std::optional<double> solve_pole(double delta, double g, double J, double d);

/// [1 - g^2 ga0'(omega_bs)]^-1. Throws DomainError outside the open gap.
double residue(double omega_bs, double g, double J, double d);

struct ResonantPlateau {
  double z_bs;        // (1 + g^2/(4 J^2 |d|))^-1
  double f_infinity;  // z_bs^2
};

ResonantPlateau resonant_plateau(double g, double J, double d);

/// Pole, residue and edge distance together; empty when solve_pole is.
std::optional<BoundStateInfo> bound_state(double delta, double g, double J, double d);

/// Z_BS exp(-i omega_bs t).
std::complex<double> bound_state_amplitude(const BoundStateInfo& info, double t);

}  // namespace sshqfi
