#include "scramble/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/ellint_rd.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>
#include <cmath>
#include <numbers>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double entropy_of_spectrum(const Eigen::VectorXd& lambda) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > 1e-14) s -= lambda[i] * std::log(lambda[i]);
  return std::max(0.0, s);
}

// Schmidt matrix of a symmetric state cut into L and N - L spins.
Eigen::MatrixXcd schmidt_matrix(const DickeState& psi, int l) {
  const int n = psi.n_spins;
  const int r = n - l;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(l + 1, r + 1);
  for (int k = 0; k <= l; ++k)
    for (int kr = 0; kr <= r; ++kr)
      m(k, kr) = psi.amplitudes[k + kr] *
                 std::exp(0.5 * (log_binom(l, k) + log_binom(r, kr) - log_binom(n, k + kr)));
  return m;
}

}  // namespace

void BlockPartition::validate(int n_spins) const {
  if (n_a < 1 || n_b < 1 || n_c < 1) throw DomainError("block sizes must be >= 1");
  if (n_a + n_b + n_c >= n_spins) throw DomainError("blocks A, B, C must leave a non-empty D");
}

void SymmetricRDM::check() const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalError("reduced density matrix is not Hermitian");
  if (std::abs(matrix.trace() - cplx(1.0)) > 1e-12) throw NumericalError("reduced density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw NumericalError("reduced density matrix is not positive");
}

SymmetricRDM dicke_block_rdm(const DickeState& psi, const std::vector<int>& block_sizes) {
  const int n = psi.n_spins;
  if (psi.amplitudes.size() != n + 1) throw DomainError("Dicke state length must be N + 1");
  int total = 0;
  Eigen::Index dim = 1;
  for (int l : block_sizes) {
    if (l < 0) throw DomainError("block sizes must be non-negative");
    total += l;
    dim *= l + 1;
  }
  if (total > n) throw DomainError("block sizes exceed the number of spins");
  const int r = n - total;
  Eigen::MatrixXcd psi_mat = Eigen::MatrixXcd::Zero(dim, r + 1);
  std::vector<int> ks(block_sizes.size(), 0);
  for (Eigen::Index row = 0; row < dim; ++row) {
    // decode row into per-block excitation numbers, first block fastest
    Eigen::Index rem = row;
    int ksum = 0;
    double lw = 0.0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
      ks[b] = static_cast<int>(rem % (block_sizes[b] + 1));
      rem /= block_sizes[b] + 1;
      ksum += ks[b];
      lw += log_binom(block_sizes[b], ks[b]);
    }
    for (int kr = 0; kr <= r; ++kr)
      psi_mat(row, kr) = psi.amplitudes[ksum + kr] *
                         std::exp(0.5 * (lw + log_binom(r, kr) - log_binom(n, ksum + kr)));
  }
  SymmetricRDM rho;
  rho.block_sizes = block_sizes;
  rho.matrix = psi_mat * psi_mat.adjoint();
  return rho;
}

double entropy(const SymmetricRDM& rho) {
  const cplx tr = rho.matrix.trace();
  if (std::abs(tr - cplx(1.0)) > 1e-8) throw NumericalError("density matrix trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("density matrix eigensolver failed");
  return entropy_of_spectrum(es.eigenvalues());
}

double block_entropy(const DickeState& psi, int block_size) {
  const int n = psi.n_spins;
  if (block_size < 0 || block_size > n) throw DomainError("block size outside [0, N]");
  if (block_size == 0 || block_size == n) return 0.0;
  const Eigen::MatrixXcd m = schmidt_matrix(psi, block_size);
  const Eigen::MatrixXcd g = m.rows() <= m.cols() ? Eigen::MatrixXcd(m * m.adjoint())
                                                  : Eigen::MatrixXcd(m.adjoint() * m);
  if (std::abs(g.trace() - cplx(1.0)) > 1e-8) throw NumericalError("density matrix trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(es.eigenvalues());
}

std::vector<double> block_entropies(const DickeState& psi) {
  const int n = psi.n_spins;
  std::vector<double> s(static_cast<std::size_t>(n) + 1, 0.0);
  for (int l = 1; l <= n / 2; ++l) s[l] = s[n - l] = block_entropy(psi, l);
  return s;
}

double tmi_from_entropies(const std::vector<double>& s, const BlockPartition& p) {
  const int n = static_cast<int>(s.size()) - 1;
  p.validate(n);
  return s[p.n_a] + s[p.n_b] + s[p.n_c] - s[p.n_a + p.n_b] - s[p.n_a + p.n_c] - s[p.n_b + p.n_c] +
         s[p.n_a + p.n_b + p.n_c];
}

double tmi(const DickeState& psi, const BlockPartition& p) {
  p.validate(psi.n_spins);
  std::vector<double> s(static_cast<std::size_t>(psi.n_spins) + 1, -1.0);
  for (int l : {p.n_a, p.n_b, p.n_c, p.n_a + p.n_b, p.n_a + p.n_c, p.n_b + p.n_c, p.n_a + p.n_b + p.n_c})
    if (s[l] < 0) s[l] = block_entropy(psi, l);
  for (double& v : s) v = std::max(v, 0.0);
  return tmi_from_entropies(s, p);
}

double ergodic_tmi_reference(int a, int b, int c) {
  if (a < 1 || b < 1 || c < 1) throw DomainError("block sizes must be >= 1");
  const double num = (a + 1.0) * (b + 1.0) * (c + 1.0) * (a + b + c + 1.0);
  const double den = (a + b + 1.0) * (a + c + 1.0) * (b + c + 1.0);
  return std::log(num / den);
}

double page_entropy_reference(int m, int n) {
  if (m < 1 || m > n) throw DomainError("page entropy requires 1 <= m <= n");
  return std::log(static_cast<double>(m)) - m / (2.0 * n);
}

double carlson_rf(double x, double y, double z) { return boost::math::ellint_rf(x, y, z); }

double carlson_rd(double x, double y, double z) { return boost::math::ellint_rd(x, y, z); }

double elliptic_f(double phi, double k) {
  const double s = std::sin(phi), c = std::cos(phi);
  const double q = 1.0 - k * k * s * s;
  if (q < -1e-15) throw DomainError("elliptic integral amplitude beyond the turning point");
  return s * carlson_rf(c * c, std::max(q, 0.0), 1.0);
}

double elliptic_e(double phi, double k) {
  const double s = std::sin(phi), c = std::cos(phi);
  const double q = 1.0 - k * k * s * s;
  if (q < -1e-15) throw DomainError("elliptic integral amplitude beyond the turning point");
  const double y = std::max(q, 0.0);
  return s * carlson_rf(c * c, y, 1.0) - (k * k / 3.0) * s * s * s * carlson_rd(c * c, y, 1.0);
}

double phi_q_z(double J, double h) {
  if (!(h > 0.0) || !(J > 0.0)) throw DomainError("phi_q_z needs J > 0 and h > 0");
  const double k = J / (2.0 * h);
  if (k < 1.0)
    throw DomainError("phi_q_z is defined only for k = J/(2h) >= 1 (quench below the critical field)");
  if (k == 1.0) return 0.0;
  const double th = std::asin(1.0 / k);
  const double f = elliptic_f(th, k);
  const double e = elliptic_e(th, k);
  const double w = std::numbers::pi / (2.0 * f);
  return ((k * k - 1.0) + e / f - w * w) / (k * k);
}

}  // namespace scramble
