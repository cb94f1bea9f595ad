#include "sshqfi/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sshqfi/errors.hpp"
#include "sshqfi/format.hpp"

namespace sshqfi {

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidParameter("invalid model parameter: " + what); };
  if (!std::isfinite(J) || J <= 0.0) fail("J must be positive and finite");
  if (!std::isfinite(d) || std::abs(d) > 1.0) fail("|d| must not exceed 1");
  if (!std::isfinite(g) || g < 0.0) fail("g must be nonnegative and finite");
  if (!std::isfinite(delta)) fail("delta must be finite");
  if (L < 0) fail("L must be nonnegative");
}

std::size_t site_index(int L, int cell, Sublattice s) {
  const auto offset = static_cast<std::size_t>(cell + L);
  return 1 + 2 * offset + (s == Sublattice::B ? 1 : 0);
}

HamiltonianMatrix::HamiltonianMatrix(std::vector<double> diagonal, std::vector<Bond> bonds)
    : diagonal_(std::move(diagonal)), bonds_(std::move(bonds)) {
  for (auto& b : bonds_) {
    if (b.row == b.col || b.row >= dim() || b.col >= dim())
      throw InvalidParameter("bond indices out of range or on the diagonal");
    if (b.row > b.col) std::swap(b.row, b.col);
  }
}

double HamiltonianMatrix::entry(std::size_t i, std::size_t j) const {
  if (i == j) return diagonal_.at(i);
  if (i > j) std::swap(i, j);
  double v = 0.0;
  for (const auto& b : bonds_)
    if (b.row == i && b.col == j) v += b.value;
  return v;
}

void HamiltonianMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) y[i] = diagonal_[i] * x[i];
  for (const auto& b : bonds_) {
    y[b.row] += b.value * x[b.col];
    y[b.col] += b.value * x[b.row];
  }
}

Eigen::MatrixXd HamiltonianMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diagonal_[static_cast<std::size_t>(i)];
  for (const auto& b : bonds_) {
    const auto r = static_cast<Eigen::Index>(b.row);
    const auto c = static_cast<Eigen::Index>(b.col);
    m(r, c) += b.value;
    m(c, r) += b.value;
  }
  return m;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& p) {
  p.validate();
  const std::size_t n = p.dimension();
  std::vector<double> diag(n, 0.0);
  diag[HamiltonianMatrix::emitter_index()] = p.delta;

  const double intra = p.J * (1.0 + p.d);
  const double inter = p.J * (1.0 - p.d);

  std::vector<Bond> bonds;
  bonds.reserve(4 * static_cast<std::size_t>(p.L) + 2);
  bonds.push_back({HamiltonianMatrix::emitter_index(), site_index(p.L, 0, Sublattice::A), p.g});
  for (int cell = -p.L; cell <= p.L; ++cell) {
    bonds.push_back({site_index(p.L, cell, Sublattice::A), site_index(p.L, cell, Sublattice::B), intra});
    if (cell < p.L)
      bonds.push_back({site_index(p.L, cell, Sublattice::B), site_index(p.L, cell + 1, Sublattice::A), inter});
  }
  return HamiltonianMatrix(std::move(diag), std::move(bonds));
}

void write_matrix(std::ostream& os, const HamiltonianMatrix& h) {
  os << "# dim=" << h.dim() << '\n';
  for (std::size_t i = 0; i < h.dim(); ++i)
    if (h.diagonal()[i] != 0.0) os << i << ' ' << i << ' ' << format_g17(h.diagonal()[i]) << '\n';
  for (const auto& b : h.bonds()) os << b.row << ' ' << b.col << ' ' << format_g17(b.value) << '\n';
}

BandPair dispersion(double k, double J, double d) {
  const double c = std::cos(0.5 * k);
  const double s = std::sin(0.5 * k);
  const double w = 2.0 * J * std::sqrt(c * c + d * d * s * s);
  return {w, -w};
}

double dispersion_hopping_form(double k, double J, double d) {
  const double j1 = J * (1.0 + d);
  const double j2 = J * (1.0 - d);
  return std::sqrt(std::max(0.0, j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * std::cos(k)));
}

BandStructure band_edges(double J, double d) {
  if (!(J > 0.0)) throw InvalidParameter("J must be positive");
  const double inner = 2.0 * J * std::abs(d);
  return {inner, 2.0 * J, 2.0 * inner};
}

double max_group_velocity(double J, double d, std::size_t n_k) {
  n_k = std::max<std::size_t>(n_k, 10001);
  // The band is even in k, so [0, pi] suffices.
  const double dk = std::numbers::pi / static_cast<double>(n_k - 1);
  double prev = dispersion(0.0, J, d).upper;
  double vmax = 0.0;
  for (std::size_t i = 1; i < n_k; ++i) {
    const double cur = dispersion(dk * static_cast<double>(i), J, d).upper;
    vmax = std::max(vmax, std::abs(cur - prev) / dk);
    prev = cur;
  }
  return vmax;
}

double recurrence_horizon(const ModelParams& p) {
  p.validate();
  if (p.L < 1) throw InvalidParameter("recurrence horizon needs L >= 1");
  const double v = max_group_velocity(p.J, p.d);
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.9 * static_cast<double>(p.L) / v;
}

std::optional<std::string> horizon_warning(const ModelParams& p, double t_end) {
  const double horizon = p.L >= 1 ? recurrence_horizon(p) : 0.0;
  if (t_end <= horizon) return std::nullopt;
  std::ostringstream msg;
  msg << "requested time " << format_double(t_end) << " exceeds the recurrence horizon "
      << format_double(horizon) << " for L=" << p.L << "; finite-size reflections may reach the emitter";
  return msg.str();
}

}  // namespace sshqfi
