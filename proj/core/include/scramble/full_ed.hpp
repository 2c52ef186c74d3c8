#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "scramble/collective.hpp"
#include "scramble/exact_dynamics.hpp"
#include "scramble/series.hpp"

namespace scramble {

/// Largest chain handled by the full 2^N backend.
inline constexpr int kMaxFullSpins = 14;

enum class Boundary { Open, Periodic };

/// J_ij = J |i - j|^-alpha / N(alpha) for i != j, zero diagonal.
/// alpha = +infinity gives the nearest-neighbour chain (N(inf) = 1).
/// Not limited to kMaxFullSpins; the per-site semiclassics use it too.
struct CouplingMatrix {
  Eigen::MatrixXd j;
  double alpha = 0.0;
  double kac = 1.0;
  Boundary boundary = Boundary::Open;
};

/// N(alpha) = sum_{r=1}^{N} r^-alpha.
double kac_normalization(int n_spins, double alpha);

CouplingMatrix build_couplings(int n_spins, double alpha, double J, Boundary boundary = Boundary::Open);

/// Pure state on (C^2)^N. Bit i of the basis index is 1 when site i points
/// down, so index 0 is |up...up> and the number of set bits matches the
/// Dicke index of the symmetric sector.
struct FullState {
  int n_spins = 0;
  Eigen::VectorXcd amplitudes;

  static FullState polarized_up(int n_spins);
  Eigen::Index dim() const noexcept { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

/// H = -(1/2) sum_{i != j} J_ij s^z_i s^z_j - h sum_i s^x_i, applied matrix-free.
struct FullHamiltonian {
  int n_spins = 0;
  double h = 0.0;
  CouplingMatrix couplings;
  Eigen::VectorXd diagonal;  ///< Ising energy of every basis state

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  /// Dense real matrix; refused above 12 spins.
  Eigen::MatrixXd dense() const;
  /// Gershgorin interval [lo, hi] containing the spectrum.
  std::pair<double, double> spectral_bounds() const;
};

/// Throws DomainError for N < 1 or N > kMaxFullSpins.
FullHamiltonian build_longrange_hamiltonian(int n_spins, double alpha, double J, double h,
                                            Boundary boundary = Boundary::Open);

/// Lowest eigenvalue from dense diagonalisation (N <= 12).
double full_ground_energy(const FullHamiltonian& h);

/// Diagonal phases of the collective kick exp(-i (K / 2N) (sum_i s^z_i)^2),
/// which equals exp(-i (2K/N) S_z^2) on every sector.
Eigen::VectorXcd full_kick_phases(int n_spins, double K);

enum class PropagationStrategy { Auto, Dense, Chebyshev };

/// Auto uses dense diagonalisation up to this many spins and the Chebyshev
/// expansion above.
inline constexpr int kDenseMaxSpins = 8;

/// exp(-i H t) on full-space vectors.
class FullPropagator {
 public:
  explicit FullPropagator(FullHamiltonian h, PropagationStrategy strategy = PropagationStrategy::Auto);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& x, double t) const;
  PropagationStrategy strategy() const noexcept { return strategy_; }
  const FullHamiltonian& hamiltonian() const noexcept { return h_; }

 private:
  Eigen::VectorXcd chebyshev(const Eigen::VectorXcd& x, double t) const;

  FullHamiltonian h_;
  PropagationStrategy strategy_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
  double centre_ = 0.0, radius_ = 1.0;
};

/// One Floquet period U = kick exp(-i H tau) and its inverse.
struct FullFloquet {
  FullPropagator propagator;
  Eigen::VectorXcd kick;
  double tau = 1.0;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& x) const;
};

/// Auto selects the Chebyshev path here: periods are applied one after
/// another, and chained dense steps accumulate eigenvector orthogonality error.
FullFloquet build_full_floquet(const FullHamiltonian& h, double K, double tau,
                               PropagationStrategy strategy = PropagationStrategy::Auto);

std::vector<FullState> full_evolve(const FullState& psi0, const FullPropagator& prop,
                                   const std::vector<double>& times);

/// U^n psi0 for n = 0..n_periods.
std::vector<FullState> full_evolve_kicked(const FullState& psi0, const FullFloquet& u, int n_periods);

/// <m_z> with m_z = (1/N) sum_i s^z_i.
double full_mz(const FullState& psi);

/// <S^2> with S_a = sum_i s^a_i / 2.
double full_total_spin_squared(const FullState& psi);

/// Same quantities as qfi() on the symmetric sector.
QfiResult full_qfi(const FullState& psi);

/// c(t) = ||[m_z(t), m_z] psi0||^2 with m_z(t) = exp(iHt) m_z exp(-iHt).
TimeSeriesRecord full_square_commutator(const FullState& psi0, const FullPropagator& prop,
                                        const std::vector<double>& times);

/// Stroboscopic c(n tau) for n = 0..n_periods.
TimeSeriesRecord full_square_commutator_kicked(const FullState& psi0, const FullFloquet& u,
                                               int n_periods);

/// Site mask helpers: bit i set means site i belongs to the subsystem.
using SiteMask = std::uint32_t;
SiteMask site_range(int first, int count);

/// Reduced density matrix of the sites in `mask`; row bit r is the r-th
/// site of the mask in increasing order.
Eigen::MatrixXcd full_reduced_density_matrix(const FullState& psi, SiteMask mask);

/// Von Neumann entropy (nats) of the sites in `mask`, from the smaller side
/// of the cut. Eigenvalues below 1e-14 are dropped.
double full_entropy(const FullState& psi, SiteMask mask);

/// Disjoint, non-empty site sets A, B, C; D is the remainder and must be non-empty.
struct SitePartition {
  SiteMask a = 0, b = 0, c = 0;
  void validate(int n_spins) const;
};

double partition_tmi(const FullState& psi, const SitePartition& part);

enum class PartitionScan {
  Contiguous,  ///< four cut positions on the ring: A, B, C consecutive, D the rest
  All          ///< every assignment of sites to A, B, C, D (N <= 10)
};

struct TmiMinimum {
  double value = 0.0;
  SitePartition partition;
  std::size_t partitions_scanned = 0;
};

TmiMinimum min_tmi(const FullState& psi, PartitionScan scan = PartitionScan::Contiguous);

/// Embeds a Dicke state: amplitude a_k / sqrt(C(N, k)) on every basis state
/// with k down spins.
FullState embed_dicke(const DickeState& psi);

/// Orthogonal projection onto the symmetric sector, in Dicke coordinates.
DickeState project_to_dicke(const FullState& psi);

/// P^dagger A P for the isometry P of embed_dicke: the (N+1) x (N+1) matrix
/// of a full-space linear map restricted to the symmetric sector.
Eigen::MatrixXcd restrict_to_symmetric(int n_spins,
                                       const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op);

}  // namespace scramble
