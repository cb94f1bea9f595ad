#pragma once

// Single-excitation Hamiltonian of an emitter locally coupled to a finite,
// open SSH chain, and band-structure helpers for the infinite chain.
//
// Basis ordering: index 0 is the emitter |e>, followed by the unit cells
// n = -L..L from left to right, A site before B site. The emitter couples to
// A_0 only.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sshqfi {

struct ModelParams {
  double J = 1.0;      // hopping scale
  double d = 0.0;      // dimerization, |d| <= 1
  double g = 0.0;      // emitter-bath coupling
  double delta = 0.0;  // emitter detuning from the gap center
  int L = 0;           // half-length, chain has 2L+1 unit cells

  std::size_t dimension() const { return 4 * static_cast<std::size_t>(L) + 3; }

  /// Throws InvalidParameter when any invariant fails.
  void validate() const;
};

enum class Sublattice { A, B };

/// Basis position of a chain site for half-length L.
std::size_t site_index(int L, int cell, Sublattice s);

struct Bond {
  std::size_t row;  // row < col
  std::size_t col;
  double value;
};

/// Real symmetric sparse matrix stored as a diagonal plus upper-triangle bonds.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(std::vector<double> diagonal, std::vector<Bond> bonds);

  std::size_t dim() const { return diagonal_.size(); }
  static constexpr std::size_t emitter_index() { return 0; }

  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  double entry(std::size_t i, std::size_t j) const;

  /// y = H x.
  void apply(std::span<const double> x, std::span<double> y) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::vector<double> diagonal_;
  std::vector<Bond> bonds_;
};

HamiltonianMatrix build_hamiltonian(const ModelParams& params);

/// Writes `# dim=<N>` followed by `i j value` lines for the diagonal and upper
/// triangle (nonzero diagonal entries only), 17 significant digits.
void write_matrix(std::ostream& os, const HamiltonianMatrix& h);

struct BandPair {
  double upper;
  double lower;
};

/// Bulk SSH bands in the dimerization form, +-2J sqrt(cos^2(k/2) + d^2 sin^2(k/2)).
BandPair dispersion(double k, double J, double d);

/// Upper band from the hopping form sqrt(J1^2 + J2^2 + 2 J1 J2 cos k).
double dispersion_hopping_form(double k, double J, double d);

struct BandStructure {
  double inner_edge;  // 2J|d|
  double outer_edge;  // 2J
  double gap_width;   // 4J|d|
};

BandStructure band_edges(double J, double d);

/// Largest |d omega_+/dk| found by finite differences on a uniform k-grid.
double max_group_velocity(double J, double d, std::size_t n_k = 20001);

/// Conservative time before finite-size reflections reach the emitter:
/// 0.9 L / v_max. Infinite when the bands are flat (|d| = 1).
double recurrence_horizon(const ModelParams& params);

/// Message when t_end lies beyond the recurrence horizon, otherwise empty.
std::optional<std::string> horizon_warning(const ModelParams& params, double t_end);

}  // namespace sshqfi
