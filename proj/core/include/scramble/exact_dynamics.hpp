#pragma once

#include <array>
#include <vector>

#include "scramble/collective.hpp"
#include "scramble/series.hpp"

namespace scramble {

/// Quench protocol on the Dicke sector. With `product_state` set the
/// evolution starts from |up...up> regardless of h0.
struct QuenchPlan {
  double h0 = 0.0;
  double hf = 2.0;
  double J = 1.0;
  std::vector<double> times;
  bool product_state = true;

  /// Throws DomainError unless times start at 0 and increase strictly.
  void validate() const;
};

/// Lowest eigenvector of H(h0). At h0 = 0 the ferromagnetic doublet is
/// degenerate and the fully polarised state is returned instead.
DickeState ground_state(int n_spins, double J, double h0);

/// psi(t) = exp(-iHt) psi0 for every t, via the spectral decomposition of H.
std::vector<DickeState> evolve_quench(const DickeState& psi0, const CollectiveOperator& H,
                                      const std::vector<double>& times);

/// Stroboscopic states U^n psi0 for n = 0..n_periods.
std::vector<DickeState> evolve_kicked(const DickeState& psi0, const CollectiveOperator& U,
                                      int n_periods);

/// Columns psi(t_j) = V exp(-i E t_j) V^dagger psi0 (batched).
Eigen::MatrixXcd evolve_columns(const Eigen::VectorXcd& psi0, const SpectralDecomposition& gen,
                                const std::vector<double>& times);

enum class CommutatorStrategy { Auto, Dense, VectorChain };

/// c(t) = -<psi0|[m_z(t), m_z]^2|psi0> with m_z(t) evolved by `gen`
/// (a Hamiltonian decomposition, or a Floquet decomposition evaluated at
/// t = n tau). Computed as ||[m_z(t), m_z] psi0||^2. Auto uses dense
/// Heisenberg matrices up to dimension 33 and vector chains above.
TimeSeriesRecord square_commutator(const DickeState& psi0, const SpectralDecomposition& gen,
                                   const std::vector<double>& times,
                                   CommutatorStrategy strategy = CommutatorStrategy::Auto);

struct QfiResult {
  double fq = 0.0;                 ///< 4 max_a Var(S_a) over a in {x, y, z}
  double density = 0.0;            ///< fq / N
  std::array<double, 3> variance{};  ///< Var(S_x), Var(S_y), Var(S_z)
  std::array<double, 3> mean{};      ///< <S_x>, <S_y>, <S_z>
  double fq_covariance = 0.0;      ///< 4 lambda_max of the symmetrised covariance
};

QfiResult qfi(const DickeState& psi);

/// <psi0| A B(t) |psi0> with B(t) = exp(iHt) B exp(-iHt).
cplx two_time_correlator(const DickeState& psi0, const CollectiveOperator& A,
                         const CollectiveOperator& B, const SpectralDecomposition& gen, double t);

/// First time after `t_min` at which |m_z(t) - baseline| climbs back to
/// `fraction` of its initial peak deviation, having first dropped below it.
/// The baseline is the series mean; the initial peak is taken over [0, t_min].
/// Returns a negative value when no revival occurs in the series.
double detect_revival(const TimeSeriesRecord& mz, double t_min = 10.0, double fraction = 0.9);

}  // namespace scramble
