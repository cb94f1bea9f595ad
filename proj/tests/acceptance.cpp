// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sshqfi/dynamics.hpp"
#include "sshqfi/greens.hpp"
#include "sshqfi/lattice.hpp"
#include "sshqfi/metrology.hpp"
#include "sshqfi/sweep.hpp"

using namespace sshqfi;

namespace {

constexpr double kJ = 1.0;
const TimeGrid kGrid(0.0, 100.0, 2000);

struct Outcome {
  bool pass;
  std::string detail;
};

// Closed-form resonant plateau, written out independently of the library.
double plateau_oracle(double g, double d) {
  const double z = 1.0 / (1.0 + g * g / (4.0 * kJ * kJ * std::abs(d)));
  return z * z;
}

ModelParams point(double d, double g, double delta, int L) { return ModelParams{kJ, d, g, delta, L}; }

QfiTrace krylov_qfi(const ModelParams& p, std::size_t m) {
  const auto h = build_hamiltonian(p);
  return qfi_trace(survival_amplitude(lanczos_spectral(h, std::min(m, h.dim())), kGrid));
}

double plateau_average(const ModelParams& p, std::size_t m) { return late_time_average(krylov_qfi(p, m), 40.0, 100.0); }

double max_abs_diff(const QfiTrace& a, const QfiTrace& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i) worst = std::max(worst, std::abs(a.f[i] - b.f[i]));
  return worst;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Outcome resonant_plateau_check() {
  double worst = 0.0;
  std::ostringstream os;
  for (double d : {0.7, 0.5, 0.3, 0.1}) {
    const double avg = plateau_average(point(d, 0.4, 0.0, 500), 350);
    worst = std::max(worst, std::abs(avg - plateau_oracle(0.4, d)));
    os << "d=" << d << ":" << fmt(avg) << "/" << fmt(plateau_oracle(0.4, d)) << " ";
  }
  os << "max|dev|=" << fmt(worst);
  return {worst <= 0.02, os.str()};
}

Outcome residue_identity_check() {
  double worst_num = 0.0, worst_an = 0.0;
  for (int i = 0; i <= 15; ++i) {
    const double d = 0.05 + 0.05 * i;
    const double z_closed = 1.0 / (1.0 + 0.16 / (4.0 * kJ * kJ * d));
    const auto spec = eigendecompose(build_hamiltonian(point(d, 0.4, 0.0, 220)));
    const auto nb = numerical_bound_state(spec, band_edges(kJ, d));
    const auto an = bound_state(0.0, 0.4, kJ, d);
    if (!nb || !an) return {false, "missing bound state at d=" + fmt(d)};
    worst_num = std::max(worst_num, std::abs(nb->info.z_bs - z_closed));
    worst_an = std::max(worst_an, std::abs(an->z_bs - z_closed));
  }
  return {worst_num <= 1e-3 && worst_an <= 1e-10,
          "16 d-values in [0.05,0.8]: max|Z_num-Z|=" + fmt(worst_num) + " max|Z_pole-Z|=" + fmt(worst_an)};
}

Outcome coupling_monotonicity_check() {
  std::vector<double> avgs;
  double worst = 0.0;
  std::ostringstream os;
  for (double g : {0.1, 0.4, 0.6, 0.8}) {
    const double avg = plateau_average(point(0.3, g, 0.0, 500), 350);
    avgs.push_back(avg);
    worst = std::max(worst, std::abs(avg - plateau_oracle(g, 0.3)));
    os << "g=" << g << ":" << fmt(avg) << "/" << fmt(plateau_oracle(g, 0.3)) << " ";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < avgs.size(); ++i) decreasing = decreasing && avgs[i] < avgs[i - 1];
  os << "max|dev|=" << fmt(worst) << " strictly_decreasing=" << decreasing;
  return {decreasing && worst <= 0.02, os.str()};
}

Outcome gapless_control_check() {
  const double avg = plateau_average(point(0.0, 0.4, 0.0, 500), 350);
  return {avg < 0.02, "F_bar=" + fmt(avg)};
}

Outcome greens_oracle_check() {
  double worst_q = 0.0, worst_der = 0.0;
  for (double d : {0.1, 0.3, 0.5}) {
    const double edge = 2.0 * kJ * d;
    for (int i = 0; i < 50; ++i) {
      const double w = edge * (-0.98 + 1.96 * i / 49.0);
      worst_q = std::max(worst_q, std::abs(ga0_quadrature_limit(w, kJ, d) - ga0(w, kJ, d)));
      const double h = 1e-6 * edge;
      const double fd = (ga0(w + h, kJ, d) - ga0(w - h, kJ, d)) / (2 * h);
      const double an = ga0_derivative(w, kJ, d);
      worst_der = std::max(worst_der, std::abs(an - fd) / std::abs(an));
    }
  }
  return {worst_q <= 1e-6 && worst_der <= 1e-6,
          "150 points: max|ga0-quad|=" + fmt(worst_q) + " max rel|ga0'-fd|=" + fmt(worst_der)};
}

Outcome pole_tracking_check() {
  const double d = 0.3;
  const auto bands = band_edges(kJ, d);
  double worst = 0.0;
  double prev_z = INFINITY, prev_edge = INFINITY, prev_z_num = INFINITY, prev_edge_num = INFINITY;
  bool monotone = true;
  for (int i = 0; i < 27; ++i) {
    const double x = 1.3 * i / 26.0;
    const auto spec = eigendecompose(build_hamiltonian(point(d, 0.4, x * 2 * kJ * d, 220)));
    const auto nb = numerical_bound_state(spec, bands);
    const auto an = bound_state(x * 2 * kJ * d, 0.4, kJ, d);
    if (!nb || !an) return {false, "missing bound state at x=" + fmt(x)};
    const double avg = late_time_average(qfi_trace(survival_amplitude(spec, kGrid)), 40.0, 100.0);
    worst = std::max(worst, std::abs(avg - an->f_bs));
    monotone = monotone && an->z_bs <= prev_z && an->delta_edge <= prev_edge && nb->info.z_bs <= prev_z_num &&
               nb->info.delta_edge <= prev_edge_num;
    prev_z = an->z_bs;
    prev_edge = an->delta_edge;
    prev_z_num = nb->info.z_bs;
    prev_edge_num = nb->info.delta_edge;
  }
  return {worst <= 0.05 && monotone,
          "27 points: max|F_bar-Z^2|=" + fmt(worst) + " Z,delta_edge (numerical and analytic) nonincreasing=" + std::to_string(monotone)};
}

Outcome useful_window_check() {
  auto window = [](double delta) { return useful_window(krylov_qfi(point(0.3, 0.4, delta, 500), 350), 0.4, 20.0, 100.0); };
  const double w0 = window(0.0), w57 = window(0.57), w72 = window(0.72);
  const bool pass = std::abs(w0 - 80.0) <= 0.5 && std::abs(w57 - 55.9) <= 1.5 && w72 == 0.0;
  return {pass, "W(0)=" + fmt(w0) + " W(0.57)=" + fmt(w57) + " W(0.72)=" + fmt(w72)};
}

Outcome symmetry_check() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dd(0.1, 0.8), gd(0.1, 0.8), xd(0.05, 1.0);
  double worst_d = 0.0, worst_x = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = dd(rng), g = gd(rng), x = xd(rng);
    worst_d = std::max(worst_d, max_abs_diff(krylov_qfi(point(d, g, x, 500), 350), krylov_qfi(point(-d, g, x, 500), 350)));
    worst_x = std::max(worst_x, max_abs_diff(krylov_qfi(point(d, g, x, 500), 350), krylov_qfi(point(d, g, -x, 500), 350)));
  }
  return {worst_d < 1e-12 && worst_x < 1e-10,
          "5 random sets: max|F(d)-F(-d)|=" + fmt(worst_d) + " max|F(D)-F(-D)|=" + fmt(worst_x)};
}

Outcome method_equivalence_check() {
  double worst = 0.0;
  for (auto [d, g, x, L] : {std::tuple{0.3, 0.4, 0.0, 250}, std::tuple{0.3, 0.4, 0.3, 250}, std::tuple{0.1, 0.6, -0.1, 220},
                            std::tuple{0.0, 0.4, 0.0, 200}}) {
    const auto h = build_hamiltonian(point(d, g, x, L));
    const auto a = survival_amplitude(eigendecompose(h), kGrid);
    const auto b = survival_amplitude(lanczos_spectral(h, 350), kGrid);
    for (std::size_t i = 0; i < a.u.size(); ++i) worst = std::max(worst, std::abs(a.u[i] - b.u[i]));
  }
  const auto conv = run_convergence(point(0.3, 0.4, 0.0, 250), kGrid, 300, 2, 50, 1e-6, 1);
  double worst_conv = 0.0;
  for (const auto& c : conv.checks) worst_conv = std::max(worst_conv, c.max_deviation);
  return {worst <= 1e-8 && conv.pass && worst_conv < 1e-6,
          "max|u_exact-u_krylov|=" + fmt(worst) + " convergence max|dF|=" + fmt(worst_conv)};
}

Outcome qfi_closure_check() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rd(0.0, 1.0), ad(-M_PI, M_PI);
  double e_qfi = 0.0, e_norm = 0.0, e_orth = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto u = std::polar(std::sqrt(rd(rng)), ad(rng));
    const auto s = reduced_state(u, ad(rng));
    const auto& r = s.bloch;
    const auto dr = s.bloch_phase_derivative();
    const double a = std::abs(u);
    e_qfi = std::max(e_qfi, std::abs(dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2] - a * a));
    e_norm = std::max(e_norm, std::abs(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] - (1 - a * a + a * a * a * a)));
    e_orth = std::max(e_orth, std::abs(r[0] * dr[0] + r[1] * dr[1] + r[2] * dr[2]));
  }
  return {e_qfi <= 1e-12 && e_norm <= 1e-12 && e_orth <= 1e-12,
          "1e4 samples: " + fmt(e_qfi) + " " + fmt(e_norm) + " " + fmt(e_orth)};
}

Outcome robustness_check() {
  SweepConfig c;
  c.base = point(0.3, 0.4, 0.0, 520);
  c.axis = SweepAxis::detuning_normalized;
  for (int i = 0; i < 27; ++i) c.values.push_back(1.3 * i / 26.0);
  c.grid = kGrid;
  c.method = parse_method("krylov", 360);
  c.etas = {0.15, 0.2, 0.25};
  c.windows = {{30, 90}, {40, 100}, {50, 100}};
  c.workers = 1;
  const auto res = run_robustness(c);
  return {res.retention_consistent && res.average_consistent,
          "27 points: t_eta orderings consistent=" + std::to_string(res.retention_consistent) +
              " F_bar orderings consistent=" + std::to_string(res.average_consistent)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 resonant plateau", resonant_plateau_check},
      {"AC2 residue identity", residue_identity_check},
      {"AC3 coupling monotonicity", coupling_monotonicity_check},
      {"AC4 gapless control", gapless_control_check},
      {"AC5 Green's-function oracle", greens_oracle_check},
      {"AC6 pole and benchmark tracking", pole_tracking_check},
      {"AC7 useful windows", useful_window_check},
      {"AC8 symmetries", symmetry_check},
      {"AC9 method equivalence", method_equivalence_check},
      {"AC10 QFI closure", qfi_closure_check},
      {"AC11 robustness", robustness_check},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
