#include "sshqfi/greens.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sshqfi/errors.hpp"

namespace sshqfi {
namespace {

double gap_edge(double J, double d) { return 2.0 * J * std::abs(d); }

void require_in_gap(double omega, double J, double d) {
  if (!(J > 0.0)) throw DomainError("J must be positive");
  if (d == 0.0) throw DomainError("no central gap at d = 0");
  if (!(std::abs(omega) < gap_edge(J, d))) throw DomainError("frequency outside the open central gap");
}

}  // namespace

double ga0(double omega, double J, double d) {
  require_in_gap(omega, J, d);
  const double w2 = omega * omega;
  const double j2 = 4.0 * J * J;
  return -omega / std::sqrt((j2 - w2) * (j2 * d * d - w2));
}

double ga0_derivative(double omega, double J, double d) {
  require_in_gap(omega, J, d);
  const double w2 = omega * omega;
  const double j2 = 4.0 * J * J;
  const double prod = (j2 - w2) * (j2 * d * d - w2);
  const double num = 16.0 * J * J * J * J * d * d - w2 * w2;
  return -num / (prod * std::sqrt(prod));
}

std::complex<double> ga0_quadrature(double omega, double J, double d, double eta, std::size_t n_k) {
  if (!(eta > 0.0)) throw InvalidParameter("broadening eta must be positive");
  if (n_k < 1000) throw InvalidParameter("quadrature grid must have at least 1000 intervals");
  const std::complex<double> z(omega, eta);
  const std::complex<double> z2 = z * z;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n_k);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i <= n_k; ++i) {
    const double k = -std::numbers::pi + h * static_cast<double>(i);
    const double c = std::cos(0.5 * k);
    const double s = std::sin(0.5 * k);
    const double band2 = 4.0 * J * J * (c * c + d * d * s * s);
    const double weight = (i == 0 || i == n_k) ? 0.5 : 1.0;
    sum += weight * z / (z2 - band2);
  }
  return sum / static_cast<double>(n_k);
}

std::complex<double> ga0_quadrature_limit(double omega, double J, double d, std::size_t n_k) {
  constexpr std::array<double, 3> etas{1e-3, 1e-4, 1e-5};
  std::array<std::complex<double>, 3> values;
  for (std::size_t i = 0; i < etas.size(); ++i) values[i] = ga0_quadrature(omega, J, d, etas[i], n_k);
  // Off the band G(w + i eta) is analytic in eta with an even real part and an
  // odd imaginary part, so each is fitted with the matching powers of eta and
  // the constant term is the limit.
  auto constant_term = [&](std::array<int, 3> powers, auto part) {
    Eigen::Matrix3d a;
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = std::pow(etas[i], powers[j]);
      b(i) = part(values[i]);
    }
    return a.colPivHouseholderQr().solve(b)(0);
  };
  const double re = constant_term({0, 2, 4}, [](std::complex<double> z) { return z.real(); });
  const double im = constant_term({0, 1, 3}, [](std::complex<double> z) { return z.imag(); });
  return {re, im};
}

std::optional<double> solve_pole(double delta, double g, double J, double d) {
  if (!(J > 0.0) || !std::isfinite(delta) || !(g >= 0.0)) throw InvalidParameter("invalid pole parameters");
  const double edge = gap_edge(J, d);
  if (edge == 0.0) return std::nullopt;
  if (g == 0.0) {
    if (std::abs(delta) < edge) return delta;
    return std::nullopt;
  }

  const double g2 = g * g;
  auto lhs = [&](double w) { return w - delta - g2 * ga0(w, J, d); };

  const double eps = 1e-12 * edge;
  double lo = -edge + eps;
  double hi = edge - eps;
  // The root sits within eps of an edge when |delta| is beyond the bracket's reach.
  if (lhs(hi) <= 0.0) return hi;
  if (lhs(lo) >= 0.0) return lo;

  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = lhs(mid);
    if (f == 0.0) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double residue(double omega_bs, double g, double J, double d) {
  return 1.0 / (1.0 - g * g * ga0_derivative(omega_bs, J, d));
}

ResonantPlateau resonant_plateau(double g, double J, double d) {
  if (d == 0.0) throw DomainError("no resonant plateau without a gap (d = 0)");
  const double z = 1.0 / (1.0 + g * g / (4.0 * J * J * std::abs(d)));
  return {z, z * z};
}

std::optional<BoundStateInfo> bound_state(double delta, double g, double J, double d) {
  const auto pole = solve_pole(delta, g, J, d);
  if (!pole) return std::nullopt;
  const double z = residue(*pole, g, J, d);
  return BoundStateInfo{*pole, z, gap_edge(J, d) - std::abs(*pole), z * z};
}

std::complex<double> bound_state_amplitude(const BoundStateInfo& info, double t) {
  return std::polar(info.z_bs, -info.omega_bs * t);
}

}  // namespace sshqfi
