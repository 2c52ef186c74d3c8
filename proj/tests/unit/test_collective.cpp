#include <doctest.h>

#include "rel.hpp"

#include <cmath>
#include <numbers>

#include "scramble/collective.hpp"
#include "scramble/errors.hpp"

using namespace scramble;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("collective") {

TEST_CASE("spin-1/2 and spin-1 matrices") {
  const SpinOperators s1 = build_spin_operators(1);
  Eigen::MatrixXcd sz(2, 2), sx(2, 2);
  sz << 0.5, 0, 0, -0.5;
  sx << 0, 0.5, 0.5, 0;
  CHECK(max_abs(s1.sz.matrix - sz) == 0.0);
  CHECK(max_abs(s1.sx.matrix - sx) < 1e-15);

  const SpinOperators s2 = build_spin_operators(2);
  CHECK(s2.sz.matrix(0, 0).real() == 1.0);
  CHECK(s2.sz.matrix(1, 1).real() == 0.0);
  CHECK(s2.sz.matrix(2, 2).real() == -1.0);
  CHECK(std::abs(s2.sx.matrix(0, 1).real() - std::sqrt(2.0) / 2) < 1e-15);
  CHECK(std::abs(s2.sx.matrix(2, 1).real() - std::sqrt(2.0) / 2) < 1e-15);
  CHECK_THROWS_AS(build_spin_operators(0), DomainError);
}

TEST_CASE("angular momentum algebra") {
  for (int n : {1, 2, 7, 40, 301}) {
    const SpinOperators s = build_spin_operators(n);
    const cplx i(0, 1);
    const auto& x = s.sx.matrix;
    const auto& y = s.sy.matrix;
    const auto& z = s.sz.matrix;
    CHECK(max_abs(x * y - y * x - i * z) <= 1e-10);
    CHECK(max_abs(y * z - z * y - i * x) <= 1e-10);
    CHECK(max_abs(z * x - x * z - i * y) <= 1e-10);
    const double sp = 0.5 * n;
    const Eigen::MatrixXcd cas = x * x + y * y + z * z;
    CHECK(max_abs(cas - sp * (sp + 1) * Eigen::MatrixXcd::Identity(n + 1, n + 1)) <= 1e-10 * (1 + sp * sp));
    s.sx.check();
    s.sy.check();
  }
}

TEST_CASE("matrix-free spin products agree with dense matrices") {
  const int n = 17;
  const SpinOperators s = build_spin_operators(n);
  Eigen::VectorXcd x = Eigen::VectorXcd::Random(n + 1);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z})
    CHECK((apply_spin(a, n, x) - s[a].matrix * x).norm() < 1e-13);
}

TEST_CASE("two-level Hamiltonian") {
  const CollectiveOperator h = build_lmg_hamiltonian(1, 1.0, 1.0);
  const SpectralDecomposition dec = diagonalize_hermitian(h);
  CHECK(dec.energies()[0] == rel(-1.5).epsilon(1e-14));
  CHECK(dec.energies()[1] == rel(0.5).epsilon(1e-14));
  CHECK(lmg_energy_offset(1, 1.0) == 0.5);
}

TEST_CASE("spectrum is even in the transverse field") {
  const auto a = diagonalize_hermitian(build_lmg_hamiltonian(24, 1.0, 0.7)).energies();
  const auto b = diagonalize_hermitian(build_lmg_hamiltonian(24, 1.0, -0.7)).energies();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coherent state matches a rotated polarized state") {
  const int n = 12;
  const double th = 0.83, ph = -1.1;
  const DickeState c = DickeState::coherent(n, th, ph);
  CHECK(std::abs(c.norm() - 1.0) < 1e-13);
  // exp(-i ph S_z) exp(-i th S_y) |up>
  const SpinOperators s = build_spin_operators(n);
  const auto ry = diagonalize_hermitian(s.sy).function([&](double e) { return std::polar(1.0, -th * e); });
  const auto rz = diagonalize_hermitian(s.sz).function([&](double e) { return std::polar(1.0, -ph * e); });
  Eigen::VectorXcd ref = rz * ry * DickeState::polarized_up(n).amplitudes;
  const cplx overlap = ref.dot(c.amplitudes);
  CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
}

TEST_CASE("Floquet operator") {
  const int n = 20;
  const double tau = 0.7;
  const CollectiveOperator u = build_floquet(n, 1.0, 2.0, 3.0, tau);
  CHECK(u.unitarity_residual() <= 1e-10);

  // Without a kick, U^5 = exp(-iH 5 tau).
  const CollectiveOperator u0 = build_floquet(n, 1.0, 2.0, 0.0, tau);
  const SpectralDecomposition dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, 2.0));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Random(n + 1).normalized();
  Eigen::VectorXcd strob = psi;
  for (int k = 0; k < 5; ++k) strob = u0.matrix * strob;
  CHECK((strob - dec.evolve(psi, 5 * tau)).norm() <= 1e-10);

  // Kick factor is diagonal: U = D exp(-iH tau).
  const Eigen::MatrixXcd free = dec.function([&](double e) { return std::polar(1.0, -e * tau); });
  for (int k = 0; k <= n; ++k) {
    const double m = 0.5 * n - k;
    const cplx ph = std::polar(1.0, -(2.0 * 3.0 / n) * m * m);
    CHECK((u.matrix.row(k) - ph * free.row(k)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(build_floquet(n, 1.0, 2.0, 1.0, 0.0), DomainError);
}

TEST_CASE("parity operator") {
  const CollectiveOperator p1 = build_parity(1);
  Eigen::MatrixXcd isx(2, 2);
  isx << 0, cplx(0, 1), cplx(0, 1), 0;
  CHECK(max_abs(p1.matrix - isx) < 1e-14);

  for (int n : {5, 6, 100}) {
    const CollectiveOperator p = build_parity(n);
    const Eigen::MatrixXcd sq = p.matrix * p.matrix;
    const double sign = n % 2 ? -1.0 : 1.0;
    CHECK(max_abs(sq - sign * Eigen::MatrixXcd::Identity(n + 1, n + 1)) < 1e-10);
    // Analytic action: |M> -> i^N |-M>.
    const cplx w = parity_phase(n);
    for (int k = 0; k <= n; ++k) CHECK(std::abs(p.matrix(n - k, k) - w) < 1e-10);
    const CollectiveOperator h = build_lmg_hamiltonian(n, 1.0, 2.0);
    CHECK(max_abs(p.matrix * h.matrix - h.matrix * p.matrix) <= 1e-10);
    const ParityBasis pb = parity_basis(p);
    CHECK(pb.even_dim == n / 2 + 1);
    CHECK(static_cast<int>(pb.labels.size()) == n + 1);
  }
  const CollectiveOperator u = build_floquet(30, 1.0, 2.0, 20.0, 1.0);
  const CollectiveOperator p = build_parity(30);
  CHECK(max_abs(p.matrix * u.matrix - u.matrix * p.matrix) <= 1e-10);
}

TEST_CASE("unitary diagonalization by parity sector") {
  const int n = 40;
  const double tau = 1.0;
  const CollectiveOperator u = build_floquet(n, 1.0, 2.0, 5.0, tau);
  const CollectiveOperator p = build_parity(n);
  const SpectralDecomposition dec = diagonalize_unitary(u, tau, &p);
  const Eigen::MatrixXcd v = dec.vectors();
  CHECK(max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(n + 1, n + 1)) < 1e-10);
  const Eigen::MatrixXcd rebuilt = dec.function([&](double mu) { return std::polar(1.0, -mu * tau); });
  CHECK(max_abs(rebuilt - u.matrix) < 1e-10);
  for (Eigen::Index i = 0; i < dec.dim(); ++i) {
    CHECK(dec.energies()[i] > -std::numbers::pi / tau);
    CHECK(dec.energies()[i] <= std::numbers::pi / tau);
    // Each eigenvector is a parity eigenvector with its label.
    const Eigen::VectorXcd pv = p.matrix * v.col(i) / parity_phase(n);
    CHECK((pv - double(dec.sector_labels[static_cast<std::size_t>(i)]) * v.col(i)).norm() < 1e-9);
  }
}

}  // TEST_SUITE
