#include <doctest.h>

#include "rel.hpp"

#include <cmath>
#include <numbers>

#include "scramble/classical.hpp"
#include "scramble/entanglement.hpp"
#include "scramble/errors.hpp"

using namespace scramble;

namespace {

DickeState random_dicke(int n, unsigned seed) {
  std::srand(seed);
  DickeState s{n, Eigen::VectorXcd::Random(n + 1)};
  s.amplitudes.normalize();
  return s;
}

// Schmidt decomposition through an SVD, independent of the Gram-matrix path.
double entropy_by_svd(const DickeState& psi, int l) {
  const int n = psi.n_spins;
  Eigen::MatrixXcd m(l + 1, n - l + 1);
  for (int k = 0; k <= l; ++k)
    for (int r = 0; r <= n - l; ++r) {
      const double w = std::tgamma(l + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(l - k + 1.0)) *
                       std::tgamma(n - l + 1.0) / (std::tgamma(r + 1.0) * std::tgamma(n - l - r + 1.0)) /
                       (std::tgamma(n + 1.0) / (std::tgamma(k + r + 1.0) * std::tgamma(n - k - r + 1.0)));
      m(k, r) = psi.amplitudes[k + r] * std::sqrt(w);
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double p = svd.singularValues()[i] * svd.singularValues()[i];
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

}  // namespace

TEST_SUITE("entanglement") {

TEST_CASE("triplet M = 0 gives a maximally mixed spin") {
  DickeState s{2, Eigen::VectorXcd::Zero(3)};
  s.amplitudes[1] = 1.0;
  const SymmetricRDM rho = dicke_block_rdm(s, {1});
  CHECK((rho.matrix - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(entropy(rho) == rel(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("product state has no entanglement") {
  const DickeState up = DickeState::polarized_up(12);
  CHECK(entropy(dicke_block_rdm(up, {3, 4})) < 1e-14);
  CHECK(block_entropy(up, 5) == 0.0);
  CHECK(tmi(up, {2, 3, 4}) == 0.0);
}

TEST_CASE("entropy of simple density matrices") {
  SymmetricRDM rho{{3}, Eigen::MatrixXcd::Identity(4, 4) / 4.0};
  CHECK(entropy(rho) == rel(std::log(4.0)));
  rho.matrix *= 1.1;
  CHECK_THROWS_AS(entropy(rho), NumericalError);
}

TEST_CASE("random symmetric states: invariants") {
  const int n = 11;
  const DickeState psi = random_dicke(n, 7);
  for (int l = 1; l < n; ++l) {
    const double s = block_entropy(psi, l);
    CHECK(s == rel(block_entropy(psi, n - l)).epsilon(1e-10));
    CHECK(std::abs(s - entropy_by_svd(psi, l)) < 1e-10);
    CHECK(std::abs(s - entropy(dicke_block_rdm(psi, {l}))) < 1e-10);
  }
  // Multi-block RDMs depend only on the multiset of sizes and merge correctly.
  const SymmetricRDM r23 = dicke_block_rdm(psi, {2, 3});
  const SymmetricRDM r32 = dicke_block_rdm(psi, {3, 2});
  r23.check();
  CHECK(entropy(r23) == rel(entropy(r32)).epsilon(1e-12));
  CHECK(entropy(r23) == rel(block_entropy(psi, 5)).epsilon(1e-10));
  const double s_ab = entropy(dicke_block_rdm(psi, {2, 4}));
  CHECK(block_entropy(psi, 2) + block_entropy(psi, 4) - s_ab >= -1e-10);
  CHECK_THROWS_AS(dicke_block_rdm(psi, {6, 6}), DomainError);
}

TEST_CASE("tripartite information from block sizes") {
  const int n = 10;
  const DickeState psi = random_dicke(n, 3);
  const BlockPartition p{1, 2, 3};
  // Independent assembly from explicit multi-block density matrices.
  auto s = [&](std::vector<int> sizes) { return entropy(dicke_block_rdm(psi, sizes)); };
  const double ref = s({1}) + s({2}) + s({3}) - s({1, 2}) - s({1, 3}) - s({2, 3}) + s({1, 2, 3});
  CHECK(std::abs(tmi(psi, p) - ref) < 1e-10);
  CHECK(std::abs(tmi_from_entropies(block_entropies(psi), p) - ref) < 1e-10);
  CHECK_THROWS_AS(tmi(psi, {3, 3, 4}), DomainError);
}

TEST_CASE("closed-form references") {
  CHECK(ergodic_tmi_reference(1, 10, 20) == rel(std::log(14784.0 / 8184.0)).epsilon(1e-14));
  CHECK(ergodic_tmi_reference(1, 10, 20) == rel(0.5914).epsilon(1e-4));
  CHECK(ergodic_tmi_reference(1, 1, 1) == rel(std::log(32.0 / 27.0)));
  CHECK(ergodic_tmi_reference(1, 1, 1) == rel(0.1699).epsilon(1e-3));
  CHECK(ergodic_tmi_reference(3, 5, 9) == rel(ergodic_tmi_reference(9, 3, 5)));
  CHECK(page_entropy_reference(1, 50) == rel(-0.01));
  CHECK(page_entropy_reference(2, 2) == rel(0.1931).epsilon(1e-3));
  CHECK_THROWS_AS(page_entropy_reference(3, 2), DomainError);
}

TEST_CASE("elliptic integrals") {
  // Below unit modulus the standard library provides an independent oracle.
  for (double k : {0.1, 0.5, 0.9, 0.999})
    for (double phi : {0.2, 0.9, 1.5}) {
      CHECK(elliptic_f(phi, k) == rel(std::ellint_1(k, phi)).epsilon(1e-12));
      CHECK(elliptic_e(phi, k) == rel(std::ellint_2(k, phi)).epsilon(1e-12));
    }
  // Above unit modulus, at the turning point: reciprocal-modulus transform.
  for (double k : {1.2, 1.5, 2.0, 4.0, 10.0}) {
    const double th = std::asin(1.0 / k), q = 1.0 / k;
    CHECK(elliptic_f(th, k) == rel(std::comp_ellint_1(q) / k).epsilon(1e-10));
    const double e_ref = k * std::comp_ellint_2(q) - (k * k - 1.0) / k * std::comp_ellint_1(q);
    CHECK(elliptic_e(th, k) == rel(e_ref).epsilon(1e-10));
  }
}

TEST_CASE("z-axis QFI density from elliptic integrals") {
  CHECK_THROWS_AS(phi_q_z(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(phi_q_z(1.0, 0.0), DomainError);
  // F diverges logarithmically at the separatrix, so below k - 1 ~ 1e-3 the
  // value falls towards 0, slowly.
  double last = 1.0;
  for (double eps : {1e-3, 1e-6, 1e-9, 1e-12, 1e-15}) {
    const double v = phi_q_z(1.0, 0.5 / (1.0 + eps));
    CHECK(v < last);
    last = v;
  }
  CHECK(last < 0.05);
  CHECK(phi_q_z(1.0, 0.5) == 0.0);
  for (double k = 1.1; k <= 10.0; k += 0.1) {
    const double v = phi_q_z(1.0, 0.5 / k);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v <= 0.5);
  }
  // Values from arbitrary-precision evaluation of the same closed form.
  CHECK(phi_q_z(1.0, 0.5 / 1.1) == rel(0.0420505899474169).epsilon(1e-10));
  CHECK(phi_q_z(1.0, 0.5 / 1.001) == rel(0.101244151716029).epsilon(1e-10));
  // Orbit average of Q^2 - Qbar^2 on the classical trajectory from the pole.
  for (double k : {1.5, 2.0, 4.0}) {
    const double h = 0.5 / k;
    const double t_end = 400.0, dt = 1e-3;
    const auto tr = integrate_flow(BlochVector(0, 0, 1), 1.0, h, t_end, dt, 0.01);
    double q1 = 0.0, q2 = 0.0;
    for (const auto& m : tr.m) {
      q1 += m.z();
      q2 += m.z() * m.z();
    }
    q1 /= tr.m.size();
    q2 /= tr.m.size();
    CHECK(phi_q_z(1.0, h) == rel(q2 - q1 * q1).epsilon(2e-3));
  }
}

}  // TEST_SUITE
