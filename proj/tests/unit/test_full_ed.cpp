#include <doctest.h>

#include "rel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scramble/entanglement.hpp"
#include "scramble/errors.hpp"
#include "scramble/exact_dynamics.hpp"
#include "scramble/full_ed.hpp"
#include "scramble/spectral.hpp"

using namespace scramble;

namespace {

DickeState random_dicke(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  DickeState s;
  s.n_spins = n;
  s.amplitudes.resize(n + 1);
  for (int k = 0; k <= n; ++k) s.amplitudes[k] = cplx(g(rng), g(rng));
  s.amplitudes.normalize();
  return s;
}

Eigen::VectorXd sorted_spectrum(const Eigen::MatrixXcd& rho, Eigen::Index pad) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(pad);
  const Eigen::VectorXd v = es.eigenvalues();
  e.tail(v.size()) = v;
  std::sort(e.data(), e.data() + e.size());
  return e;
}

double slope(const TimeSeriesRecord& r, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.times[i] < lo || r.times[i] > hi) continue;
    const double x = std::log(r.times[i]), y = std::log(r.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Late-time average of the contiguous min-TMI and of the QFI density.
std::pair<double, double> late_averages(int n, double alpha) {
  const FullPropagator p(build_longrange_hamiltonian(n, alpha, 1.0, 0.75));
  std::vector<double> times;
  for (double t = 20.0; t <= 60.0 + 1e-9; t += 2.0) times.push_back(t);
  const auto states = full_evolve(FullState::polarized_up(n), p, times);
  double tmi = 0.0, fq = 0.0;
  for (const auto& s : states) {
    tmi += min_tmi(s).value;
    fq += full_qfi(s).density;
  }
  return {tmi / states.size(), fq / states.size()};
}

}  // namespace

TEST_SUITE("full_ed") {

TEST_CASE("Kac couplings") {
  CHECK(kac_normalization(7, 0.0) == 7.0);
  CHECK(kac_normalization(7, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(kac_normalization(3, 1.0) == rel(1.0 + 0.5 + 1.0 / 3.0));
  const auto c0 = build_couplings(6, 0.0, 1.5);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(c0.j(i, j) == (i == j ? 0.0 : rel(1.5 / 6)));
  const auto cinf = build_couplings(6, std::numeric_limits<double>::infinity(), 1.0);
  CHECK(cinf.j(2, 3) == 1.0);
  CHECK(cinf.j(2, 4) == 0.0);
  CHECK(cinf.j(0, 5) == 0.0);
  const auto cp = build_couplings(6, std::numeric_limits<double>::infinity(), 1.0, Boundary::Periodic);
  CHECK(cp.j(0, 5) == 1.0);
  const auto c = build_couplings(9, 1.3, 1.0);
  CHECK((c.j - c.j.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.j(1, 4) == rel(std::pow(3.0, -1.3) / kac_normalization(9, 1.3)));
  CHECK_THROWS_AS(build_longrange_hamiltonian(15, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(build_couplings(5, -1.0, 1.0), DomainError);
}

TEST_CASE("Hamiltonian restricted to the symmetric sector") {
  for (int n : {4, 10, 12}) {
    const FullHamiltonian h = build_longrange_hamiltonian(n, 0.0, 1.0, 0.8);
    const Eigen::MatrixXcd r = restrict_to_symmetric(n, [&](const Eigen::VectorXcd& x) { return h.apply(x); });
    Eigen::MatrixXcd expect = build_lmg_hamiltonian(n, 1.0, 0.8).matrix;
    expect.diagonal().array() += lmg_energy_offset(n, 1.0);
    CHECK((r - expect).cwiseAbs().maxCoeff() <= 1e-10);
  }
  const FullHamiltonian h8 = build_longrange_hamiltonian(8, 0.0, 1.0, 2.0);
  const double lmg = diagonalize_hermitian(build_lmg_hamiltonian(8, 1.0, 2.0)).energies().minCoeff();
  CHECK(std::abs(full_ground_energy(h8) - (lmg + lmg_energy_offset(8, 1.0))) <= 1e-10);
  // Dense matrix and matrix-free product agree.
  const FullHamiltonian g = build_longrange_hamiltonian(6, 1.7, 1.0, 0.4);
  const Eigen::VectorXcd x = Eigen::VectorXcd::Random(64);
  CHECK((g.dense().cast<cplx>() * x - g.apply(x)).cwiseAbs().maxCoeff() <= 1e-13);
  const auto [lo, hi] = g.spectral_bounds();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.dense(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= lo);
  CHECK(es.eigenvalues().maxCoeff() <= hi);
}

TEST_CASE("Chebyshev and dense propagation agree") {
  const FullHamiltonian h = build_longrange_hamiltonian(8, 0.5, 1.0, 0.75);
  const FullPropagator dense(h, PropagationStrategy::Dense);
  const FullPropagator cheb(h, PropagationStrategy::Chebyshev);
  CHECK(FullPropagator(h).strategy() == PropagationStrategy::Dense);
  CHECK(FullPropagator(build_longrange_hamiltonian(kDenseMaxSpins + 1, 0.5, 1.0, 0.75)).strategy() ==
        PropagationStrategy::Chebyshev);
  const Eigen::VectorXcd x = FullState::polarized_up(8).amplitudes;
  for (double t : {0.3, 7.0, 41.0, -5.0}) {
    const Eigen::VectorXcd a = dense.evolve(x, t), b = cheb.evolve(x, t);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(b.norm() - 1.0) <= 1e-12);
  }
  CHECK((cheb.evolve(cheb.evolve(x, 3.3), -3.3) - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("alpha = 0 dynamics match the symmetric sector") {
  const double hf = 2.0;
  const std::vector<double> times = uniform_times(3.0, 0.25);
  for (int n : {6, 8}) {
    const DickeState up = DickeState::polarized_up(n);
    const auto sym = evolve_quench(up, build_lmg_hamiltonian(n, 1.0, hf), times);
    const FullPropagator prop(build_longrange_hamiltonian(n, 0.0, 1.0, hf));
    const auto full = full_evolve(FullState::polarized_up(n), prop, times);
    const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, hf));
    const auto c_sym = square_commutator(up, dec, times);
    const auto c_full = full_square_commutator(FullState::polarized_up(n), prop, times);
    const double s2 = 0.5 * n * (0.5 * n + 1.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const DickeState back = project_to_dicke(full[k]);
      // Same state up to the global phase exp(-i J t / 2) of the dropped constant.
      const cplx phase = std::exp(cplx(0.0, -lmg_energy_offset(n, 1.0) * times[k]));
      CHECK((back.amplitudes - phase * sym[k].amplitudes).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(std::abs(full_mz(full[k]) - sym[k].amplitudes.cwiseAbs2().dot(mz_diagonal(n))) <= 1e-10);
      CHECK(std::abs(c_full.values[k] - c_sym.values[k]) <= 1e-10);
      const QfiResult a = full_qfi(full[k]), b = qfi(sym[k]);
      CHECK(std::abs(a.fq - b.fq) <= 1e-10);
      CHECK(std::abs(a.fq_covariance - b.fq_covariance) <= 1e-10);
      for (int ax = 0; ax < 3; ++ax) CHECK(std::abs(a.mean[ax] - b.mean[ax]) <= 1e-10);
      CHECK(std::abs(full_total_spin_squared(full[k]) - s2) <= 1e-10);
      const auto entropies = block_entropies(sym[k]);
      for (int l = 1; l < n; ++l) CHECK(std::abs(full_entropy(full[k], site_range(0, l)) - entropies[l]) <= 1e-10);
      const BlockPartition part{1, 2, n - 5};
      const SitePartition sites{site_range(0, 1), site_range(1, 2), site_range(3, n - 5)};
      CHECK(std::abs(partition_tmi(full[k], sites) - tmi(sym[k], part)) <= 1e-10);
    }
    CHECK(c_full.values[0] == 0.0);
  }
}

TEST_CASE("c(t = 0.5) at N = 8 and the two-time correlator") {
  const int n = 8;
  const DickeState up = DickeState::polarized_up(n);
  const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, 2.0));
  const FullPropagator prop(build_longrange_hamiltonian(n, 0.0, 1.0, 2.0));
  const double c_full = full_square_commutator(FullState::polarized_up(n), prop, {0.5}).values[0];
  CHECK(std::abs(square_commutator(up, dec, {0.5}).values[0] - c_full) <= 1e-10);
  CHECK(c_full > 0.0);

  // <m_z(0) m_z(t)> from explicit full-space propagation.
  CollectiveOperator mz;
  mz.matrix = mz_diagonal(n).cast<cplx>().asDiagonal();
  mz.kind = OperatorKind::Hermitian;
  const Eigen::VectorXcd psi = FullState::polarized_up(n).amplitudes;
  Eigen::VectorXd mzd(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) mzd[i] = (n - 2.0 * std::popcount(static_cast<std::uint32_t>(i))) / n;
  for (double t : {0.4, 1.7}) {
    const Eigen::VectorXcd fwd = prop.evolve(psi, t);
    const Eigen::VectorXcd back = prop.evolve(mzd.cast<cplx>().cwiseProduct(fwd), -t);
    const cplx full = psi.dot(mzd.cast<cplx>().cwiseProduct(back));
    const cplx sym = two_time_correlator(up, mz, mz, dec, t);
    CHECK(std::abs(full - sym) <= 1e-10);
  }
}

TEST_CASE("kicked dynamics and Floquet spectrum match the symmetric sector") {
  const int n = 8;
  const double J = 1.0, h = 2.0, K = 20.0, tau = 1.0;
  const FullFloquet fu = build_full_floquet(build_longrange_hamiltonian(n, 0.0, J, h), K, tau);
  const CollectiveOperator u = build_floquet(n, J, h, K, tau);
  const Eigen::MatrixXcd r = restrict_to_symmetric(n, [&](const Eigen::VectorXcd& x) { return fu.apply(x); });
  const cplx phase = std::exp(cplx(0.0, -lmg_energy_offset(n, J) * tau));
  CHECK((r - phase * u.matrix).cwiseAbs().maxCoeff() <= 1e-10);

  CollectiveOperator restricted;
  restricted.matrix = r / phase;
  restricted.kind = OperatorKind::Unitary;
  const auto a = floquet_spectrum(restricted, build_parity(n), tau);
  const auto b = floquet_spectrum(u, build_parity(n), tau);
  CHECK((a.quasienergies - b.quasienergies).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(a.parity_labels == b.parity_labels);

  const DickeState up = DickeState::polarized_up(n);
  const auto sym = evolve_kicked(up, u, 30);
  const auto full = full_evolve_kicked(FullState::polarized_up(n), fu, 30);
  std::vector<double> times;
  for (int p = 0; p <= 30; ++p) times.push_back(p * tau);
  const auto c_sym = square_commutator(up, diagonalize_unitary(u, tau), times);
  const auto c_full = full_square_commutator_kicked(FullState::polarized_up(n), fu, 30);
  for (int p = 0; p <= 30; ++p) {
    CHECK(std::abs(full_mz(full[p]) - sym[p].amplitudes.cwiseAbs2().dot(mz_diagonal(n))) <= 1e-10);
    CHECK(std::abs(c_full.values[p] - c_sym.values[p]) <= 1e-10);
  }
}

TEST_CASE("reduced density matrix of a random symmetric state") {
  const int n = 8;
  const DickeState psi = random_dicke(n, 11);
  const FullState full = embed_dicke(psi);
  CHECK(std::abs(full.norm() - 1.0) <= 1e-12);
  const SymmetricRDM sym = dicke_block_rdm(psi, {3});
  const Eigen::VectorXd expect = sorted_spectrum(sym.matrix, 8);
  // Any three sites: the complement of any five.
  for (SiteMask mask : {SiteMask{0b00000111}, SiteMask{0b10100010}, SiteMask{0b01001001}}) {
    const Eigen::VectorXd got = sorted_spectrum(full_reduced_density_matrix(full, mask), 8);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(full_entropy(full, mask) - entropy(sym)) <= 1e-10);
    CHECK(std::abs(full_entropy(full, mask) - full_entropy(full, 0xFFu & ~mask)) <= 1e-10);
  }
  CHECK((project_to_dicke(full).amplitudes - psi.amplitudes).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("TMI partitions") {
  const FullState up = FullState::polarized_up(8);
  const SitePartition p{site_range(0, 2), site_range(2, 1), site_range(5, 2)};
  CHECK(partition_tmi(up, p) == 0.0);
  CHECK(min_tmi(up).value == 0.0);
  CHECK_THROWS_AS(partition_tmi(up, {site_range(0, 2), site_range(1, 2), site_range(4, 1)}), DomainError);
  CHECK_THROWS_AS(partition_tmi(up, {site_range(0, 3), site_range(3, 3), site_range(6, 2)}), DomainError);
  CHECK_THROWS_AS(partition_tmi(up, {0, site_range(3, 3), site_range(6, 1)}), DomainError);

  // Contiguous scan: A, B, C consecutive on the ring, D non-empty.
  const int n = 7;
  std::size_t expect = 0;
  for (int p0 = 0; p0 < n; ++p0)
    for (int p1 = p0 + 1; p1 < n; ++p1)
      for (int p2 = p1 + 1; p2 < n; ++p2)
        for (int p3 = p2 + 1; p3 <= n && p3 - p0 < n; ++p3) ++expect;
  const FullPropagator prop(build_longrange_hamiltonian(n, 2.5, 1.0, 0.75));
  const FullState s = full_evolve(FullState::polarized_up(n), prop, {6.0})[0];
  const TmiMinimum contiguous = min_tmi(s);
  CHECK(contiguous.partitions_scanned == expect);
  CHECK(partition_tmi(s, contiguous.partition) == rel(contiguous.value).epsilon(1e-12));
  const TmiMinimum all = min_tmi(s, PartitionScan::All);
  CHECK(all.value <= contiguous.value + 1e-12);
  CHECK(all.partitions_scanned > contiguous.partitions_scanned);
  // Pure state: exchanging D with C leaves I3 unchanged.
  const SiteMask full_mask = (1u << n) - 1;
  const SitePartition q = contiguous.partition;
  const SitePartition swapped{q.a, q.b, full_mask & ~(q.a | q.b | q.c)};
  CHECK(partition_tmi(s, swapped) == rel(partition_tmi(s, q)).epsilon(1e-9));
  CHECK_THROWS_AS(min_tmi(FullState::polarized_up(11), PartitionScan::All), DomainError);
}

TEST_CASE("long-range quench: early power law") {
  const int n = 10;
  const FullPropagator prop(build_longrange_hamiltonian(n, 0.5, 1.0, 0.75));
  std::vector<double> times;
  for (double t = 0.02; t <= 0.3 + 1e-12; t += 0.02) times.push_back(t);
  const auto c = full_square_commutator(FullState::polarized_up(n), prop, times);
  CHECK(std::abs(slope(c, 0.02, 0.3) - 2.0) < 0.2);
}

TEST_CASE("long-range quench: late-time TMI sign and QFI trend") {
  // Time averages over t in [20, 60] for N = 8, 10, 12.
  std::vector<std::pair<double, double>> weak, strong;
  for (int n : {8, 10, 12}) {
    weak.push_back(late_averages(n, 0.5));
    strong.push_back(late_averages(n, 2.5));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    INFO("N index " << i << ": alpha 0.5 TMI " << weak[i].first << ", alpha 2.5 TMI " << strong[i].first);
    CHECK(weak[i].first >= 0.0);
    CHECK(strong[i].first < 0.0);
  }
  // QFI density keeps growing with N for alpha = 0.5 and stops growing for 2.5.
  CHECK(weak[1].second > weak[0].second);
  CHECK(weak[2].second > weak[1].second);
  CHECK(strong[2].second <= 1.05 * strong[1].second);
}

}  // TEST_SUITE
