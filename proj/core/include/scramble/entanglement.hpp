#pragma once

#include <vector>

#include "scramble/collective.hpp"

namespace scramble {

/// Sizes of blocks A, B, C; D holds the remaining N - nA - nB - nC spins.
struct BlockPartition {
  int n_a = 1, n_b = 1, n_c = 1;

  /// Throws DomainError unless every size is >= 1 and D is non-empty.
  void validate(int n_spins) const;
};

/// Density matrix of k blocks of a permutation-symmetric state. Each block of
/// L spins contributes its (L + 1)-dimensional symmetric subspace; the row
/// index is k_1 + (L_1 + 1) (k_2 + (L_2 + 1) (...)) with k_i down spins in
/// block i.
struct SymmetricRDM {
  std::vector<int> block_sizes;
  Eigen::MatrixXcd matrix;

  /// Throws NumericalError when Hermiticity, trace or positivity fail.
  void check() const;
};

SymmetricRDM dicke_block_rdm(const DickeState& psi, const std::vector<int>& block_sizes);

/// Von Neumann entropy in nats, dropping eigenvalues below 1e-14.
/// Throws NumericalError when the trace differs from 1 by more than 1e-8.
double entropy(const SymmetricRDM& rho);

/// Entropy of any L spins, from the (L+1) x (N-L+1) Schmidt matrix.
double block_entropy(const DickeState& psi, int block_size);

/// All block entropies S_L for L = 0..N (S_0 = S_N = 0).
std::vector<double> block_entropies(const DickeState& psi);

/// I3 = S_A + S_B + S_C - S_AB - S_AC - S_BC + S_ABC. For a symmetric state
/// every term depends only on the merged block size.
double tmi(const DickeState& psi, const BlockPartition& part);

/// Same quantity from a table of block entropies indexed by size.
double tmi_from_entropies(const std::vector<double>& s_by_size, const BlockPartition& part);

/// ln n~ for a Haar-typical state of the symmetric sector:
/// n~ = (nA+1)(nB+1)(nC+1)(nA+nB+nC+1) / ((nA+nB+1)(nA+nC+1)(nB+nC+1)).
double ergodic_tmi_reference(int n_a, int n_b, int n_c);

/// Average entanglement of a random pure state on C^m x C^n: ln m - m/(2n).
double page_entropy_reference(int m, int n);

/// Carlson symmetric integrals.
double carlson_rf(double x, double y, double z);
double carlson_rd(double x, double y, double z);

/// Incomplete elliptic integrals F(phi | k) and E(phi | k) in the modulus
/// convention, valid for any k with k^2 sin^2(phi) <= 1 (including k > 1).
double elliptic_f(double phi, double k);
double elliptic_e(double phi, double k);

/// Long-time z-axis QFI density after a quench from the polarised state,
/// k = J / (2h) >= 1:
/// (1/k^2) [(k^2 - 1) + E(t_k, k)/F(t_k, k) - (pi / (2 F(t_k, k)))^2],
/// t_k = arcsin(1/k) the turning point of the classical orbit.
double phi_q_z(double J, double h);

}  // namespace scramble
