#pragma once

// Emitter survival amplitude u(t) = <e| exp(-iHt) |e> from the emitter-projected
// spectrum, obtained either by dense diagonalization or by Lanczos seeded on |e>.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sshqfi/lattice.hpp"

namespace sshqfi {

inline constexpr std::size_t kDenseSolveLimit = 20000;
inline constexpr double kLanczosBreakdownTolerance = 1e-12;

enum class Method { exact, krylov };

struct SpectralPair {
  double energy;
  double weight;  // |<e|psi>|^2
};

struct SpectralData {
  std::vector<SpectralPair> pairs;  // ascending energy
  Method method = Method::exact;
  std::size_t krylov_dim = 0;  // steps actually taken (krylov only)
  bool breakdown = false;      // Lanczos stopped before the requested dimension

  double total_weight() const;
};

/// Uniform grid of n_steps + 1 samples including both endpoints.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t n_steps);

  /// Grid on [t_start, t_end] with spacing closest to dt.
  static TimeGrid with_spacing(double t_start, double t_end, double dt);

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t size() const { return n_steps_ + 1; }
  double spacing() const { return (t_end_ - t_start_) / static_cast<double>(n_steps_); }
  double operator[](std::size_t i) const;

 private:
  double t_start_;
  double t_end_;
  std::size_t n_steps_;
};

struct AmplitudeTrace {
  TimeGrid grid;
  std::vector<std::complex<double>> u;
};

/// All eigenpairs of H with their emitter weights. Throws DimensionGuard when
/// dim exceeds kDenseSolveLimit.
SpectralData eigendecompose(const HamiltonianMatrix& h);

/// Lanczos with full reorthogonalization, seeded on the emitter state, for at
/// most m steps. Ritz values carry the squared first components of the
/// tridiagonal eigenvectors as weights.
SpectralData lanczos_spectral(const HamiltonianMatrix& h, std::size_t m);

std::complex<double> survival_amplitude_at(const SpectralData& spec, double t);

AmplitudeTrace survival_amplitude(const SpectralData& spec, const TimeGrid& grid);

/// CSV with header `t,re_u,im_u,qfi`.
void write_trace_csv(std::ostream& os, const AmplitudeTrace& trace);

}  // namespace sshqfi
