#include <doctest.h>

#include "rel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "scramble/errors.hpp"
#include "scramble/spectral.hpp"

using namespace scramble;

namespace {

double fold(double e, double tau) {
  const double w = 2.0 * M_PI / tau;
  double x = std::remainder(e, w);
  if (x <= -M_PI / tau) x += w;
  return x;
}

// Eigenphases of U^T U with U Haar-random: the circular orthogonal ensemble.
std::vector<double> coe_phases(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  const Eigen::MatrixXcd coe = q.transpose() * q;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(coe, false);
  std::vector<double> out;
  for (int i = 0; i < d; ++i) out.push_back(std::arg(es.eigenvalues()[i]));
  return out;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("K = 0 quasienergies are folded energies") {
  const int n = 30;
  const double tau = 0.7;
  const auto s = floquet_spectrum(build_floquet(n, 1.0, 2.0, 0.0, tau), build_parity(n), tau);
  const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, 2.0));
  std::vector<double> folded;
  for (Eigen::Index i = 0; i < dec.dim(); ++i) folded.push_back(fold(dec.energies()[i], tau));
  std::sort(folded.begin(), folded.end());
  REQUIRE(s.quasienergies.size() == n + 1);
  for (int i = 0; i <= n; ++i) CHECK(std::abs(s.quasienergies[i] - folded[static_cast<std::size_t>(i)]) < 1e-9);
  for (int i = 0; i < n; ++i) CHECK(s.quasienergies[i] <= s.quasienergies[i + 1]);
  CHECK(s.quasienergies[0] > -M_PI / tau);
  CHECK(s.quasienergies[n] <= M_PI / tau);
  CHECK(s.modulus_residual <= 1e-10);
}

TEST_CASE("parity sectors have the expected dimensions") {
  for (int n : {7, 8, 31}) {
    const auto s = floquet_spectrum(build_floquet(n, 1.0, 2.0, 3.0, 1.0), build_parity(n), 1.0);
    CHECK(s.sector(+1).size() == static_cast<std::size_t>((n + 2) / 2));
    CHECK(s.sector(-1).size() == static_cast<std::size_t>((n + 1) / 2));
    CHECK(s.sector(0).size() == static_cast<std::size_t>(n + 1));
  }
  // Count per sector does not depend on K.
  const auto a = floquet_spectrum(build_floquet(20, 1.0, 2.0, 0.2, 1.0), build_parity(20), 1.0);
  const auto b = floquet_spectrum(build_floquet(20, 1.0, 2.0, 20.0, 1.0), build_parity(20), 1.0);
  CHECK(a.sector(+1).size() == b.sector(+1).size());
}

TEST_CASE("parity mixing is rejected") {
  CollectiveOperator u = build_floquet(6, 1.0, 2.0, 1.0, 1.0);
  const CollectiveOperator sz = build_spin_operators(6).sz;
  // exp(-i 0.3 S_z) breaks the x-parity.
  CollectiveOperator rot;
  rot.matrix = Eigen::MatrixXcd::Zero(7, 7);
  for (int i = 0; i < 7; ++i) rot.matrix(i, i) = std::exp(cplx(0.0, -0.3 * sz.matrix(i, i).real()));
  rot.kind = OperatorKind::Unitary;
  u.matrix = rot.matrix * u.matrix;
  CHECK_THROWS_AS(floquet_spectrum(u, build_parity(6), 1.0), DomainError);
}

TEST_CASE("level spacing ratio of uncorrelated levels") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<double> levels(10000);
  for (double& x : levels) x = u(rng);
  const double r = level_spacing_ratio(levels, 2.0 * M_PI);
  CHECK(std::abs(r - (2.0 * std::log(2.0) - 1.0)) < 0.01);
  CHECK(std::abs(r - kPoissonRatio) < 0.01);
}

TEST_CASE("level spacing ratio of the circular orthogonal ensemble") {
  double r = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) r += level_spacing_ratio(coe_phases(300, seed), 2.0 * M_PI) / 3.0;
  CHECK(std::abs(r - kWignerDysonRatio) < 0.015);
}

TEST_CASE("level spacing ratio is shift and scale invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> levels(200);
  for (double& x : levels) x = u(rng);
  const double r = level_spacing_ratio(levels, 1.0);
  std::vector<double> moved;
  for (double x : levels) moved.push_back(3.5 * x - 2.0);
  CHECK(level_spacing_ratio(moved, 3.5) == rel(r).epsilon(1e-12));
  CHECK_THROWS_AS(level_spacing_ratio(std::vector<double>(49, 0.0), 1.0), DomainError);
}

TEST_CASE("chaotic kicked top: a single sector is Wigner-Dyson, mixed sectors are not") {
  const int n = 400;
  const auto s = floquet_spectrum(build_floquet(n, 1.0, 2.0, 20.0, 1.0), build_parity(n), 1.0);
  const double single = level_spacing_ratio(s, +1);
  const double mixed = level_spacing_ratio(s, 0);
  CHECK(std::abs(single - kWignerDysonRatio) < 0.03);
  CHECK(mixed < single - 0.05);
}

TEST_CASE("Ehrenfest estimates") {
  CHECK(ehrenfest_estimate(100, FlowRegime::Regular) == rel(10.0));
  CHECK(ehrenfest_estimate(std::exp(4.0), FlowRegime::Unstable, 1.0) == rel(2.0).epsilon(1e-14));
  double prev_r = 0.0, prev_u = 0.0;
  for (int n = 10; n <= 1000; n *= 10) {
    const double r = ehrenfest_estimate(n, FlowRegime::Regular);
    const double u = ehrenfest_estimate(n, FlowRegime::Unstable, 0.7);
    CHECK(r > prev_r);
    CHECK(u > prev_u);
    prev_r = r;
    prev_u = u;
  }
  CHECK_THROWS_AS(ehrenfest_estimate(100, FlowRegime::Unstable), DomainError);
  CHECK_THROWS_AS(ehrenfest_estimate(100, FlowRegime::Unstable, -1.0), DomainError);
}

}  // TEST_SUITE
