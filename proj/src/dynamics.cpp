#include "sshqfi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "sshqfi/errors.hpp"
#include "sshqfi/format.hpp"

namespace sshqfi {

double SpectralData::total_weight() const {
  return std::accumulate(pairs.begin(), pairs.end(), 0.0,
                         [](double acc, const SpectralPair& p) { return acc + p.weight; });
}

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start < 0.0)
    throw InvalidParameter("time grid must start at a finite t >= 0");
  if (!(t_end > t_start)) throw InvalidParameter("time grid needs t_end > t_start");
  if (n_steps == 0) throw InvalidParameter("time grid needs at least one step");
}

TimeGrid TimeGrid::with_spacing(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be positive");
  const double steps = std::round((t_end - t_start) / dt);
  return TimeGrid(t_start, t_end, static_cast<std::size_t>(std::max(1.0, steps)));
}

double TimeGrid::operator[](std::size_t i) const {
  if (i == n_steps_) return t_end_;
  return t_start_ + (t_end_ - t_start_) * static_cast<double>(i) / static_cast<double>(n_steps_);
}

SpectralData eigendecompose(const HamiltonianMatrix& h) {
  if (h.dim() > kDenseSolveLimit)
    throw DimensionGuard("dense diagonalization refused for dim=" + std::to_string(h.dim()) +
                         " (limit " + std::to_string(kDenseSolveLimit) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.to_dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed to converge");

  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const auto e = static_cast<Eigen::Index>(HamiltonianMatrix::emitter_index());

  SpectralData out;
  out.method = Method::exact;
  out.pairs.reserve(h.dim());
  for (Eigen::Index a = 0; a < values.size(); ++a) {
    const double overlap = vectors(e, a);
    out.pairs.push_back({values(a), overlap * overlap});
  }
  return out;
}

SpectralData lanczos_spectral(const HamiltonianMatrix& h, std::size_t m) {
  const std::size_t n = h.dim();
  if (m < 1 || m > n)
    throw InvalidParameter("Krylov dimension must satisfy 1 <= m <= dim (m=" + std::to_string(m) +
                           ", dim=" + std::to_string(n) + ")");

  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd q(rows, static_cast<Eigen::Index>(m));
  std::vector<double> alpha;
  std::vector<double> beta;
  alpha.reserve(m);
  beta.reserve(m);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(rows);
  v(static_cast<Eigen::Index>(HamiltonianMatrix::emitter_index())) = 1.0;
  Eigen::VectorXd w(rows);
  bool breakdown = false;

  for (std::size_t j = 0; j < m; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    q.col(col) = v;
    h.apply(std::span<const double>(v.data(), n), std::span<double>(w.data(), n));
    const double a = v.dot(w);
    alpha.push_back(a);
    if (j + 1 == m) break;

    w -= a * v;
    if (j > 0) w -= beta.back() * q.col(col - 1);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = q.leftCols(col + 1);
      w -= basis * (basis.transpose() * w);
    }
    const double b = w.norm();
    if (b < kLanczosBreakdownTolerance) {
      breakdown = true;
      break;
    }
    beta.push_back(b);
    v = w / b;
  }

  const auto k = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
  Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1))
                              : Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (tri.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver failed to converge");

  SpectralData out;
  out.method = Method::krylov;
  out.krylov_dim = static_cast<std::size_t>(k);
  out.breakdown = breakdown;
  out.pairs.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    const double first = tri.eigenvectors()(0, a);
    out.pairs.push_back({tri.eigenvalues()(a), first * first});
  }
  return out;
}

std::complex<double> survival_amplitude_at(const SpectralData& spec, double t) {
  double re = 0.0;
  double im = 0.0;
  for (const auto& p : spec.pairs) {
    const double phase = p.energy * t;
    re += p.weight * std::cos(phase);
    im -= p.weight * std::sin(phase);
  }
  return {re, im};
}

AmplitudeTrace survival_amplitude(const SpectralData& spec, const TimeGrid& grid) {
  AmplitudeTrace trace{grid, {}};
  trace.u.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) trace.u.push_back(survival_amplitude_at(spec, grid[i]));
  return trace;
}

void write_trace_csv(std::ostream& os, const AmplitudeTrace& trace) {
  os << "t,re_u,im_u,qfi\n";
  for (std::size_t i = 0; i < trace.u.size(); ++i) {
    const auto u = trace.u[i];
    os << format_double(trace.grid[i]) << ',' << format_double(u.real()) << ',' << format_double(u.imag())
       << ',' << format_double(std::norm(u)) << '\n';
  }
}

}  // namespace sshqfi
