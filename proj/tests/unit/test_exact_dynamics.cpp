#include <doctest.h>

#include "rel.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "scramble/errors.hpp"
#include "scramble/exact_dynamics.hpp"

using namespace scramble;

namespace {

// Reference propagator from Pade scaling-and-squaring, independent of the
// eigendecomposition used by the library.
Eigen::MatrixXcd expm_minus_i(const Eigen::MatrixXcd& h, double t) {
  const Eigen::MatrixXcd a = cplx(0, -t) * h;
  return a.exp();
}

double brute_force_c(const DickeState& psi, const Eigen::MatrixXcd& u) {
  const Eigen::VectorXd mz = mz_diagonal(psi.n_spins);
  const Eigen::MatrixXcd a = mz.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd at = u.adjoint() * a * u;
  const Eigen::MatrixXcd comm = at * a - a * at;
  return (-(psi.amplitudes.adjoint() * comm * comm * psi.amplitudes)(0, 0)).real();
}

}  // namespace

TEST_SUITE("exact_dynamics") {

TEST_CASE("quench plan validation") {
  QuenchPlan p;
  p.times = {0.0, 0.5, 1.0};
  CHECK_NOTHROW(p.validate());
  p.times = {0.1, 0.5};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.times = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("eigenstates are stationary and norms are preserved") {
  const int n = 30;
  const CollectiveOperator h = build_lmg_hamiltonian(n, 1.0, 0.8);
  const DickeState gs = ground_state(n, 1.0, 0.8);
  const std::vector<double> times = {0.0, 0.3, 7.0, 120.0};
  for (const auto& s : evolve_quench(gs, h, times)) CHECK(std::abs(s.amplitudes.dot(gs.amplitudes)) == rel(1.0).epsilon(1e-12));

  const DickeState up = DickeState::polarized_up(n);
  const double e0 = (up.amplitudes.dot(h.matrix * up.amplitudes)).real();
  const double hnorm = h.matrix.cwiseAbs().maxCoeff();
  for (const auto& s : evolve_quench(up, h, times)) {
    CHECK(std::abs(s.norm() - 1.0) <= 1e-12);
    const double e = (s.amplitudes.dot(h.matrix * s.amplitudes)).real();
    CHECK(std::abs(e - e0) <= 1e-10 * hnorm);
  }
  CHECK(ground_state(n, 1.0, 0.0).amplitudes[0] == cplx(1.0));
}

TEST_CASE("evolution agrees with a Pade matrix exponential") {
  const int n = 14;
  const CollectiveOperator h = build_lmg_hamiltonian(n, 1.0, 2.0);
  const DickeState up = DickeState::polarized_up(n);
  const auto states = evolve_quench(up, h, {0.0, 1.3, 4.0});
  CHECK((states[1].amplitudes - expm_minus_i(h.matrix, 1.3) * up.amplitudes).norm() < 1e-11);
  CHECK((states[2].amplitudes - expm_minus_i(h.matrix, 4.0) * up.amplitudes).norm() < 1e-11);
}

TEST_CASE("kicked evolution") {
  const int n = 16;
  const double tau = 0.5;
  const DickeState up = DickeState::polarized_up(n);
  const CollectiveOperator u0 = build_floquet(n, 1.0, 2.0, 0.0, tau);
  const auto strob = evolve_kicked(up, u0, 6);
  REQUIRE(strob.size() == 7);
  CHECK((strob[0].amplitudes - up.amplitudes).norm() == 0.0);
  const auto cont = evolve_quench(up, build_lmg_hamiltonian(n, 1.0, 2.0), {0.0, 6 * tau});
  CHECK((strob[6].amplitudes - cont[1].amplitudes).norm() < 1e-10);
  const CollectiveOperator u = build_floquet(n, 1.0, 2.0, 20.0, 1.0);
  for (const auto& s : evolve_kicked(up, u, 50)) CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("square commutator against a brute-force reference") {
  const int n = 12;
  const DickeState up = DickeState::polarized_up(n);
  const CollectiveOperator h = build_lmg_hamiltonian(n, 1.0, 2.0);
  const SpectralDecomposition dec = diagonalize_hermitian(h);
  const std::vector<double> times = {0.0, 0.5, 3.0, 11.0};
  const auto dense = square_commutator(up, dec, times, CommutatorStrategy::Dense);
  const auto chain = square_commutator(up, dec, times, CommutatorStrategy::VectorChain);
  CHECK(dense.values[0] < 1e-28);
  CHECK(chain.values[0] < 1e-28);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double ref = brute_force_c(up, expm_minus_i(h.matrix, times[j]));
    CHECK(std::abs(dense.values[j] - ref) < 1e-10);
    CHECK(std::abs(chain.values[j] - ref) < 1e-10);
    CHECK(chain.values[j] <= 4.0);
  }
}

TEST_CASE("square commutator of a Floquet generator") {
  const int n = 40;
  const double tau = 1.0;
  const DickeState up = DickeState::polarized_up(n);
  const CollectiveOperator u = build_floquet(n, 1.0, 2.0, 20.0, tau);
  const CollectiveOperator p = build_parity(n);
  const SpectralDecomposition dec = diagonalize_unitary(u, tau, &p);
  const std::vector<double> times = {0.0, 1.0, 2.0, 5.0};
  const auto c = square_commutator(up, dec, times);
  Eigen::MatrixXcd un = Eigen::MatrixXcd::Identity(n + 1, n + 1);
  int done = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    while (done < static_cast<int>(times[j])) {
      un = u.matrix * un;
      ++done;
    }
    CHECK(std::abs(c.values[j] - brute_force_c(up, un)) < 1e-10);
  }
}

TEST_CASE("early-time square commutator follows 16 h^2 t^2 / N^3") {
  const int n = 200;
  const double h = 2.0, t = 1e-3;
  const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, h));
  const auto c = square_commutator(DickeState::polarized_up(n), dec, {t});
  const double expect = 16.0 * h * h * t * t / (double(n) * n * n);
  CHECK(c.values[0] == rel(expect).epsilon(1e-4));
}

TEST_CASE("quantum Fisher information") {
  const int n = 10;
  const QfiResult up = qfi(DickeState::polarized_up(n));
  CHECK(up.density == rel(1.0).epsilon(1e-14));
  CHECK(up.variance[0] == rel(n / 4.0).epsilon(1e-14));
  CHECK(up.variance[1] == rel(n / 4.0).epsilon(1e-14));
  CHECK(std::abs(up.variance[2]) < 1e-14);
  CHECK(up.mean[2] == rel(n / 2.0));

  // Dicke state M = 0: Var S_x = S(S+1)/2.
  DickeState d0{n, Eigen::VectorXcd::Zero(n + 1)};
  d0.amplitudes[n / 2] = 1.0;
  const double s = n / 2.0;
  const QfiResult q = qfi(d0);
  CHECK(q.fq == rel(2.0 * s * (s + 1)).epsilon(1e-13));
  CHECK(q.fq_covariance >= q.fq - 1e-12);
}

TEST_CASE("two-time correlators") {
  const int n = 20;
  const DickeState up = DickeState::polarized_up(n);
  const SpinOperators s = build_spin_operators(n);
  CollectiveOperator mz{s.sz.matrix / (n / 2.0), OperatorKind::Hermitian};
  CollectiveOperator mx{s.sx.matrix / (n / 2.0), OperatorKind::Hermitian};
  const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, 2.0));
  CHECK(std::abs(two_time_correlator(up, mz, mz, dec, 0.0) - cplx(1.0)) < 1e-14);
  // <A B(t)>* = <B(t) A>
  const cplx ab = two_time_correlator(up, mx, mz, dec, 1.7);
  const Eigen::VectorXcd fwd = dec.evolve(up.amplitudes, 1.7);
  const Eigen::VectorXcd bt_a = dec.evolve(mz.matrix * fwd, -1.7);
  // <B(t) A> = <psi| B(t) A |psi> = (B(t) psi)^dagger (A psi)
  const Eigen::VectorXcd bt_psi = dec.evolve(mz.matrix * dec.evolve(up.amplitudes, 1.7), -1.7);
  const cplx ba = bt_psi.dot(mx.matrix * up.amplitudes);
  CHECK(std::abs(std::conj(ab) - ba) < 1e-12);
  (void)bt_a;
}

TEST_CASE("revival detector on a synthetic signal") {
  TimeSeriesRecord r;
  for (double t = 0.0; t <= 200.0; t += 0.05) {
    const double env = std::exp(-t * t / 200.0) + std::exp(-(t - 120.0) * (t - 120.0) / 200.0);
    r.push(t, env * std::cos(4.0 * t));
  }
  const double t_rev = detect_revival(r, 10.0, 0.9);
  CHECK(t_rev > 110.0);
  CHECK(t_rev < 121.0);
  TimeSeriesRecord flat;
  for (double t = 0.0; t <= 50.0; t += 0.1) flat.push(t, std::exp(-t) * std::cos(3 * t));
  CHECK(detect_revival(flat) < 0.0);
}

}  // TEST_SUITE
