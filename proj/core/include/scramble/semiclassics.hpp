#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "scramble/classical.hpp"
#include "scramble/series.hpp"

namespace scramble {

/// Independent generator for sample `index` of a run seeded with `seed`.
/// Streams do not depend on the order or thread in which samples are drawn.
std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Continuous truncated Wigner approximation on the collective sphere

struct TwaSample {
  BlochVector m0 = BlochVector::UnitZ();
  double weight = 1.0;
};

/// Gaussian Wigner function of |up...up>: m0_x, m0_y i.i.d. normal with
/// variance 1/N, m0_z = sqrt(1 - m0_x^2 - m0_y^2). Draws with
/// m0_x^2 + m0_y^2 > 1 are redrawn. Weights are 1/n_samples.
std::vector<TwaSample> twa_sample(int n_spins, std::size_t n_samples, std::uint64_t seed);

/// Mean-field dynamics used by both Monte Carlo methods. With K = 0 the flow is
/// continuous and can be sampled at any time; otherwise samples are
/// stroboscopic and every requested time must be a multiple of tau.
struct SemiclassicalDynamics {
  double J = 1.0;
  double h = 2.0;
  double K = 0.0;
  double tau = 1.0;
  double dt = 1e-3;

  bool kicked() const { return K != 0.0; }
  KickParams kick_params() const { return {J, h, K, tau, dt}; }
};

/// Classical trajectory of one sample on `times` (tangent optional).
BlochTrajectory evolve_sample(const BlochVector& m0, const SemiclassicalDynamics& dyn,
                              const std::vector<double>& times, bool with_tangent = false);

/// Weighted average of f(m(t)) over the samples.
TimeSeriesRecord twa_observable(const std::vector<TwaSample>& samples,
                                const SemiclassicalDynamics& dyn, const std::vector<double>& times,
                                const std::function<double(const BlochVector&)>& f,
                                std::size_t threads = 0);

/// calibration * (2/N)^2 * <{m_z(t), m_z(0)}^2> with the sphere bracket
/// {f, g} = m . (grad f x grad g), evaluated from the tangent map. The
/// calibration defaults to 1, which reproduces 16 h^2 t^2 / N^3 at early times.
/// Samples whose tangent overflows are dropped and counted in metadata.
TimeSeriesRecord twa_square_commutator(const std::vector<TwaSample>& samples, int n_spins,
                                       const SemiclassicalDynamics& dyn,
                                       const std::vector<double>& times, double calibration = 1.0,
                                       std::size_t threads = 0);

// ---------------------------------------------------------------------------
// Discrete truncated Wigner approximation over per-site spins

/// n_samples configurations of N classical spins, stored sample-major as
/// 3 x N column blocks (x, y, z per site).
struct DiscreteSpinEnsemble {
  int n_spins = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> configs;

  using SampleMap = Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>>;
  using ConstSampleMap = Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>>;

  SampleMap sample(std::size_t s) {
    return SampleMap(configs.data() + 3 * static_cast<std::size_t>(n_spins) * s, 3, n_spins);
  }
  ConstSampleMap sample(std::size_t s) const {
    return ConstSampleMap(configs.data() + 3 * static_cast<std::size_t>(n_spins) * s, 3, n_spins);
  }
};

/// Draws each site from the two weight-1/2 phase points of |up>:
/// sigma = (+1, +1, +1) or (-1, -1, +1).
DiscreteSpinEnsemble dtwa_sample(int n_spins, std::size_t n_samples, std::uint64_t seed);

/// Per-site mean-field model. H = -sum_{i<j} J_ij s^z_i s^z_j - h sum_i s^x_i,
/// so each spin obeys ds_i/dt = 2 s_i x (h, 0, sum_j J_ij s^z_j). A period ends
/// with a rotation of every spin about z by 2 sum_j kick_ij s^z_j
/// (counter-clockwise), when `kick` is non-empty.
struct DtwaModel {
  Eigen::MatrixXd couplings;
  Eigen::MatrixXd kick;
  double h = 2.0;
  double tau = 1.0;
  double dt = 1e-3;
  /// Set by dtwa_all_to_all: uniform couplings J/N and kicks K/N allow the
  /// two-species reduction.
  bool all_to_all = false;
  double J = 0.0;
  double K = 0.0;

  int n_spins() const { return static_cast<int>(couplings.rows()); }
  bool kicked() const { return kick.size() != 0; }
  void validate() const;
};

/// Uniform model J_ij = J/N (i != j), kick_ij = K/N; no kick when K = 0.
DtwaModel dtwa_all_to_all(int n_spins, double J, double h, double K = 0.0, double tau = 1.0,
                          double dt = 1e-3);

/// Model with arbitrary symmetric zero-diagonal couplings and no kick.
DtwaModel dtwa_with_couplings(const Eigen::MatrixXd& couplings, double h, double dt = 1e-3);

/// How the sensitivities entering the square commutator are obtained.
/// With a_i = d(sum_j s^z_j(t)) / d s_i(0):
///  Gradient:         two tangent columns per site (x and y seeds), giving a_i^x, a_i^y.
///  Directional:      one tangent column seeded with the initial rotation about z,
///                    giving D directly.
///  FullJacobian:     the full 3N x 3N variational matrix, contracted afterwards.
///  FiniteDifference: central difference along the rotation direction.
enum class SensitivityMode { Gradient, Directional, FullJacobian, FiniteDifference };

/// How the average of D^2 treats products of symbols on the same site.
///  WeylSymmetrized: D^2 + 2 sum_i s^x_i s^y_i a^x_i a^y_i, i.e. the same-site
///                   product s^x_i s^y_i is replaced by the Weyl symbol of the
///                   symmetrised operator, which is 0. Needs per-site gradients
///                   (Gradient or FullJacobian).
///  Product:         D^2 as the plain product of symbols.
enum class CommutatorEstimator { WeylSymmetrized, Product };

struct DtwaOptions {
  bool magnetization = true;
  bool qfi = true;
  bool commutator = true;
  SensitivityMode mode = SensitivityMode::Gradient;
  CommutatorEstimator estimator = CommutatorEstimator::WeylSymmetrized;
  double fd_step = 1e-6;
  /// Use the two-species reduction when the model allows it.
  bool species_fast_path = true;
  std::size_t threads = 0;
};

struct DtwaResult {
  TimeSeriesRecord mz;  ///< <(1/N) sum_i s^z_i>
  TimeSeriesRecord fq;  ///< 4 max_n Var(S_n) / N from Weyl-symbol moments
  TimeSeriesRecord c;   ///< (4/N^4) <D^2>, see CommutatorEstimator
  std::size_t flagged = 0;
};

/// Evolves every sample and reduces the requested estimators on `times`.
/// D = sum_{ij} [s^x_i(0) ds^z_j(t)/ds^y_i(0) - s^y_i(0) ds^z_j(t)/ds^x_i(0)].
/// Reductions run over fixed blocks of 64 samples, so results do not depend
/// on the thread count.
DtwaResult dtwa_run(const DiscreteSpinEnsemble& ensemble, const DtwaModel& model,
                    const std::vector<double>& times, const DtwaOptions& options = {});

/// Ensemble snapshots at `times` (memory n_samples * N * 3 per snapshot).
std::vector<DiscreteSpinEnsemble> dtwa_evolve(const DiscreteSpinEnsemble& ensemble,
                                              const DtwaModel& model,
                                              const std::vector<double>& times,
                                              std::size_t threads = 0);

/// <m_z> of one snapshot.
double dtwa_magnetization(const DiscreteSpinEnsemble& snapshot);

/// QFI density of one snapshot. With S_a = sum_i s^a_i / 2, Weyl ordering gives
/// <S_a S_b> = (N delta_ab + <Sigma_a Sigma_b> - <sum_i s^a_i s^b_i>) / 4.
double dtwa_qfi_density(const DiscreteSpinEnsemble& snapshot);

TimeSeriesRecord dtwa_qfi(const std::vector<DiscreteSpinEnsemble>& snapshots,
                          const std::vector<double>& times);

TimeSeriesRecord dtwa_square_commutator(
    const DiscreteSpinEnsemble& ensemble, const DtwaModel& model, const std::vector<double>& times,
    SensitivityMode mode = SensitivityMode::Gradient,
    CommutatorEstimator estimator = CommutatorEstimator::WeylSymmetrized, std::size_t threads = 0);

}  // namespace scramble
