#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sshqfi/errors.hpp"
#include "sshqfi/lattice.hpp"

using namespace sshqfi;

namespace {

ModelParams params(double d, double g, double delta, int L) { return ModelParams{1.0, d, g, delta, L}; }

}  // namespace

TEST(BuildHamiltonian, SingleCellEntries) {
  const auto h = build_hamiltonian(params(0.3, 0.4, 0.0, 0));
  ASSERT_EQ(h.dim(), 3u);
  const auto m = h.to_dense();
  EXPECT_DOUBLE_EQ(m(0, 1), 0.4);
  EXPECT_DOUBLE_EQ(m(1, 2), 1.3);
  EXPECT_EQ(m(0, 2), 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(m(i, i), 0.0);
}

TEST(BuildHamiltonian, DimensionOfThousandCellChain) {
  EXPECT_EQ(build_hamiltonian(params(0.3, 0.4, 0.0, 500)).dim(), 2003u);
}

TEST(BuildHamiltonian, DecoupledEmitterRow) {
  const auto m = build_hamiltonian(params(0.3, 0.0, 0.7, 4)).to_dense();
  EXPECT_EQ(m(0, 0), 0.7);
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    EXPECT_EQ(m(0, j), 0.0);
    EXPECT_EQ(m(j, 0), 0.0);
  }
}

TEST(BuildHamiltonian, MatchesIndependentEnumeration) {
  // Oracle: write the chain as the site sequence A_{-L}, B_{-L}, ..., A_L, B_L with
  // bonds alternating J(1+d), J(1-d) and the emitter on A_0.
  const int L = 3;
  const double d = -0.45;
  const double g = 0.25;
  const double delta = -0.2;
  const auto m = build_hamiltonian(params(d, g, delta, L)).to_dense();
  const int sites = 4 * L + 2;
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(sites + 1, sites + 1);
  expect(0, 0) = delta;
  for (int s = 0; s + 1 < sites; ++s) {
    const double hop = (s % 2 == 0) ? 1.0 + d : 1.0 - d;
    expect(1 + s, 2 + s) = expect(2 + s, 1 + s) = hop;
  }
  const int a0 = 1 + 2 * L;
  expect(0, a0) = expect(a0, 0) = g;
  EXPECT_EQ((m - expect).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildHamiltonian, ExactlySymmetricAndSparse) {
  for (int L : {0, 1, 7, 40}) {
    const auto h = build_hamiltonian(params(0.37, 0.6, 0.1, L));
    const auto m = h.to_dense();
    EXPECT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(h.bonds().size(), static_cast<std::size_t>(1 + (2 * L + 1) + 2 * L));
    EXPECT_EQ(h.entry(3, 4), h.entry(4, 3));
  }
}

TEST(BuildHamiltonian, OpenBoundaryNoWraparound) {
  const int L = 5;
  const auto h = build_hamiltonian(params(0.3, 0.4, 0.0, L));
  const auto first = site_index(L, -L, Sublattice::A);
  const auto last = site_index(L, L, Sublattice::B);
  EXPECT_EQ(h.entry(first, last), 0.0);
  EXPECT_EQ(last, h.dim() - 1);
  EXPECT_EQ(h.entry(site_index(L, L, Sublattice::A), last), 1.3);
}

TEST(BuildHamiltonian, SignOfDimerizationSwapsBondRoles) {
  const int L = 6;
  const auto plus = build_hamiltonian(params(0.3, 0.4, 0.0, L));
  const auto minus = build_hamiltonian(params(-0.3, 0.4, 0.0, L));
  for (int n = -L; n < L; ++n) {
    const auto a = site_index(L, n, Sublattice::A);
    const auto b = site_index(L, n, Sublattice::B);
    const auto a_next = site_index(L, n + 1, Sublattice::A);
    EXPECT_EQ(plus.entry(a, b), minus.entry(b, a_next));
    EXPECT_EQ(plus.entry(b, a_next), minus.entry(a, b));
  }
}

TEST(BuildHamiltonian, Deterministic) {
  const auto a = build_hamiltonian(params(0.21, 0.33, 0.05, 9));
  const auto b = build_hamiltonian(params(0.21, 0.33, 0.05, 9));
  std::ostringstream sa, sb;
  write_matrix(sa, a);
  write_matrix(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(BuildHamiltonian, RejectsInvalidParameters) {
  EXPECT_THROW(build_hamiltonian(ModelParams{0.0, 0.3, 0.4, 0.0, 2}), InvalidParameter);
  EXPECT_THROW(build_hamiltonian(params(1.2, 0.4, 0.0, 2)), InvalidParameter);
  EXPECT_THROW(build_hamiltonian(params(0.3, -0.1, 0.0, 2)), InvalidParameter);
  EXPECT_THROW(build_hamiltonian(params(0.3, 0.4, 0.0, -1)), InvalidParameter);
  EXPECT_THROW(build_hamiltonian(params(0.3, 0.4, NAN, 1)), InvalidParameter);
  EXPECT_NO_THROW(build_hamiltonian(params(-1.0, 0.4, 0.0, 1)));
}

TEST(MatrixDump, HeaderAndUpperTriangle) {
  const auto h = build_hamiltonian(params(0.3, 0.4, 0.25, 1));
  std::ostringstream os;
  write_matrix(os, h);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# dim=7");
  int rows = 0;
  std::size_t i = 0, j = 0;
  double v = 0.0;
  while (in >> i >> j >> v) {
    EXPECT_LE(i, j);
    EXPECT_EQ(v, h.entry(i, j));
    ++rows;
  }
  EXPECT_EQ(rows, 1 + 6);  // detuning on the diagonal plus six bonds
  EXPECT_NE(os.str().find("0 0 0.25"), std::string::npos);
  EXPECT_NE(os.str().find("1.3"), std::string::npos);
}

TEST(Dispersion, SpecialPoints) {
  EXPECT_NEAR(dispersion(std::numbers::pi, 1.0, 0.3).upper, 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(dispersion(0.0, 1.0, 0.3).upper, 2.0);
  EXPECT_DOUBLE_EQ(dispersion(0.0, 1.0, 0.9).upper, 2.0);
  // hopping form with J1 = 1.3, J2 = 0.7: sqrt(1.69 + 0.49)
  EXPECT_NEAR(dispersion(std::numbers::pi / 2, 1.0, 0.3).upper, std::sqrt(2.18), 1e-14);
  EXPECT_NEAR(dispersion(std::numbers::pi / 2, 1.0, 0.3).upper, 1.476482, 1e-6);
}

TEST(Dispersion, FormsAgreeAndStayInBand) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> kd(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> dd(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double k = kd(rng);
    const double d = dd(rng);
    const auto w = dispersion(k, 1.0, d);
    EXPECT_EQ(w.lower, -w.upper);
    EXPECT_NEAR(w.upper, dispersion_hopping_form(k, 1.0, d), 1e-12);
    EXPECT_GE(w.upper, 2.0 * std::abs(d) - 1e-12);
    EXPECT_LE(w.upper, 2.0 + 1e-12);
  }
}

TEST(BandEdges, Substitution) {
  auto b = band_edges(1.0, 0.3);
  EXPECT_NEAR(b.inner_edge, 0.6, 1e-15);
  EXPECT_NEAR(b.gap_width, 1.2, 1e-15);
  EXPECT_EQ(band_edges(1.0, 0.0).gap_width, 0.0);
  b = band_edges(1.0, 0.5);
  EXPECT_EQ(b.inner_edge, 1.0);
  EXPECT_EQ(b.outer_edge, 2.0);
  for (double d : {-0.8, -0.1, 0.0, 0.4, 1.0}) {
    const auto e = band_edges(1.0, d);
    EXPECT_EQ(e.gap_width, 2.0 * e.inner_edge);
    EXPECT_LE(e.inner_edge, e.outer_edge);
  }
}

TEST(RecurrenceHorizon, UniformChainVelocityIsJ) {
  EXPECT_NEAR(max_group_velocity(1.0, 0.0), 1.0, 1e-6);
  EXPECT_NEAR(recurrence_horizon(params(0.0, 0.4, 0.0, 200)), 0.9 * 200, 1e-4);
}

TEST(RecurrenceHorizon, LongChainIsPreRecurrence) {
  EXPECT_GT(recurrence_horizon(params(0.3, 0.4, 0.0, 500)), 100.0);
  EXPECT_GT(recurrence_horizon(params(0.1, 0.4, 0.0, 220)), 100.0);
  // |d omega/dk| = J^2 (1 - d^2) sin k / omega peaks at cos k = -(1-|d|)/(1+|d|), where it equals J(1-|d|)
  for (double d : {0.1, 0.3, -0.5, 0.8}) {
    const double k = std::acos(-(1 - std::abs(d)) / (1 + std::abs(d)));
    const double v = (1 - d * d) * std::sin(k) / dispersion(k, 1.0, d).upper;
    EXPECT_NEAR(v, 1 - std::abs(d), 1e-14);
    EXPECT_NEAR(max_group_velocity(1.0, d), v, 1e-6);
    EXPECT_NEAR(max_group_velocity(2.0, d), 2 * v, 2e-6);
  }
}

TEST(RecurrenceHorizon, WarnsBeyondHorizon) {
  EXPECT_TRUE(horizon_warning(params(0.3, 0.4, 0.0, 10), 1000.0).has_value());
  EXPECT_FALSE(horizon_warning(params(0.3, 0.4, 0.0, 500), 100.0).has_value());
  EXPECT_TRUE(horizon_warning(params(0.3, 0.4, 0.0, 0), 1.0).has_value());
  EXPECT_THROW(recurrence_horizon(params(0.3, 0.4, 0.0, 0)), InvalidParameter);
  EXPECT_GT(recurrence_horizon(params(1.0, 0.4, 0.0, 3)), 1e6);  // flat bands
}
