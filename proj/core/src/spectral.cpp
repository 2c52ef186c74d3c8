#include "scramble/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scramble/errors.hpp"

namespace scramble {

std::vector<double> FloquetSpectrum::sector(int label) const {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < quasienergies.size(); ++i)
    if (label == 0 || parity_labels[static_cast<std::size_t>(i)] == label) out.push_back(quasienergies[i]);
  return out;
}

FloquetSpectrum floquet_spectrum(const CollectiveOperator& u, const CollectiveOperator& parity,
                                 double tau) {
  if (parity.dim() != u.dim()) throw DomainError("parity operator dimension mismatch");
  const double comm = (u.matrix * parity.matrix - parity.matrix * u.matrix).cwiseAbs().maxCoeff();
  if (comm > 1e-8) throw DomainError("Floquet operator does not commute with parity");
  const SpectralDecomposition dec = diagonalize_unitary(u, tau, &parity);

  const Eigen::Index d = dec.dim();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return dec.energies()[a] < dec.energies()[b]; });
  FloquetSpectrum s;
  s.tau = tau;
  s.quasienergies.resize(d);
  s.parity_labels.resize(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    s.quasienergies[i] = dec.energies()[order[static_cast<std::size_t>(i)]];
    s.parity_labels[static_cast<std::size_t>(i)] = dec.sector_labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  // |<v|U|v>| for each eigenvector checks that the block solver returned
  // eigenvalues on the unit circle.
  const Eigen::MatrixXcd v = dec.vectors();
  const Eigen::MatrixXcd uv = u.matrix * v;
  for (Eigen::Index i = 0; i < d; ++i)
    s.modulus_residual = std::max(s.modulus_residual, std::abs(std::abs(v.col(i).dot(uv.col(i))) - 1.0));
  if (s.modulus_residual > 1e-10) throw NumericalError("Floquet eigenvalues left the unit circle");
  return s;
}

double level_spacing_ratio(const std::vector<double>& levels, double period) {
  if (levels.size() < 50) throw DomainError("level spacing ratio needs at least 50 levels");
  if (!(period > 0.0)) throw DomainError("period must be positive");
  std::vector<double> e = levels;
  std::sort(e.begin(), e.end());
  const std::size_t n = e.size();
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = e[i + 1] - e[i];
  gaps[n - 1] = e[0] + period - e[n - 1];
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = gaps[i], b = gaps[(i + 1) % n];
    const double hi = std::max(a, b);
    if (hi <= 0.0) continue;  // exactly degenerate triple
    sum += std::min(a, b) / hi;
    ++count;
  }
  if (count == 0) throw NumericalError("all levels are degenerate");
  return sum / static_cast<double>(count);
}

double level_spacing_ratio(const FloquetSpectrum& spectrum, int sector) {
  return level_spacing_ratio(spectrum.sector(sector), 2.0 * M_PI / spectrum.tau);
}

double ehrenfest_estimate(double n_spins, FlowRegime regime, std::optional<double> lambda) {
  if (!(n_spins >= 1.0)) throw DomainError("N must be at least 1");
  if (regime == FlowRegime::Regular) return std::sqrt(n_spins);
  if (!lambda || !(*lambda > 0.0)) throw DomainError("the unstable estimate needs a positive rate lambda");
  return std::log(n_spins) / (2.0 * *lambda);
}

}  // namespace scramble
