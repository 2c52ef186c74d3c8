#pragma once

#include <optional>
#include <vector>

#include "scramble/collective.hpp"

namespace scramble {

/// Quasienergies of a Floquet operator, sorted increasing in (-pi/tau, pi/tau],
/// with the parity (+1 / -1) of each level.
struct FloquetSpectrum {
  Eigen::VectorXd quasienergies;
  std::vector<int> parity_labels;
  double tau = 1.0;

  /// Sorted quasienergies of one sector; 0 selects the whole spectrum.
  std::vector<double> sector(int label) const;
  /// max | |exp(-i mu tau)| - 1 | over the eigenvalues of U in the stored basis.
  double modulus_residual = 0.0;
};

/// Block-diagonalises U in the parity eigenbasis and diagonalises each block.
/// Throws DomainError when ||U P - P U||_max > 1e-8.
FloquetSpectrum floquet_spectrum(const CollectiveOperator& u, const CollectiveOperator& parity,
                                 double tau);

/// Mean of r_a = min(d_a, d_{a+1}) / max(d_a, d_{a+1}) over sorted levels on
/// the circle of circumference `period`, including the wrap-around spacing
/// between the last level and the first one plus `period`. Needs >= 50 levels.
double level_spacing_ratio(const std::vector<double>& levels, double period);

/// Same for one parity sector of a Floquet spectrum (0 mixes both sectors).
double level_spacing_ratio(const FloquetSpectrum& spectrum, int sector);

inline constexpr double kPoissonRatio = 0.386;
inline constexpr double kWignerDysonRatio = 0.5295;

enum class FlowRegime { Regular, Unstable };

/// Time at which semiclassics breaks down: sqrt(N) for regular flows,
/// ln(N) / (2 lambda) near an instability with rate lambda. N may be any
/// positive real (the estimate is a scaling law).
double ehrenfest_estimate(double n_spins, FlowRegime regime, std::optional<double> lambda = {});

}  // namespace scramble
