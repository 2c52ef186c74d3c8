#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace scramble {

using cplx = std::complex<double>;

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Pure state on the maximal-spin (S = N/2) sector. Index k holds the
/// amplitude of |S, M = S - k>, so index 0 is the fully polarised state.
struct DickeState {
  int n_spins = 0;
  Eigen::VectorXcd amplitudes;

  static DickeState polarized_up(int n_spins);
  /// Spin coherent state pointing along (sin th cos ph, sin th sin ph, cos th).
  static DickeState coherent(int n_spins, double theta, double phi);

  Eigen::Index dim() const noexcept { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
  double spin() const noexcept { return 0.5 * n_spins; }
};

enum class OperatorKind { General, Hermitian, Unitary };

/// Dense operator on the Dicke sector (dimension N + 1).
struct CollectiveOperator {
  Eigen::MatrixXcd matrix;
  OperatorKind kind = OperatorKind::General;

  Eigen::Index dim() const noexcept { return matrix.rows(); }
  int n_spins() const noexcept { return static_cast<int>(matrix.rows()) - 1; }
  /// max |A - A^dagger|
  double hermiticity_residual() const;
  /// max |U^dagger U - I|
  double unitarity_residual() const;
  /// True when every imaginary part vanishes exactly.
  bool is_real() const;
  /// Throws NumericalError when the declared kind does not hold
  /// (1e-12 for Hermitian, 1e-10 for unitary).
  void check() const;
};

struct SpinOperators {
  CollectiveOperator sx, sy, sz;
  const CollectiveOperator& operator[](Axis a) const;
};

SpinOperators build_spin_operators(int n_spins);

/// H = -(2J/N) S_z^2 - 2 h S_x: the infinite-range chain restricted to the
/// symmetric sector, with the constant lmg_energy_offset() removed.
CollectiveOperator build_lmg_hamiltonian(int n_spins, double J, double h);

/// Constant separating the full-chain Hamiltonian (pair sum over i != j)
/// from build_lmg_hamiltonian on the symmetric sector: H_chain = H + J/2.
double lmg_energy_offset(int n_spins, double J);

/// U = exp(-i (2K/N) S_z^2) exp(-i H tau).
CollectiveOperator build_floquet(int n_spins, double J, double h, double K, double tau);

/// exp(i pi S_x), built from the eigendecomposition of S_x.
CollectiveOperator build_parity(int n_spins);

/// Phase w with (P / w)^2 = I for P = exp(i pi S_x): w = i^N.
cplx parity_phase(int n_spins);

/// Matrix-free products with the collective spin components.
Eigen::VectorXcd apply_spin(Axis axis, int n_spins, const Eigen::VectorXcd& x);

/// Diagonal of m_z = S_z / S, ordered as DickeState amplitudes.
Eigen::VectorXd mz_diagonal(int n_spins);

/// Orthonormal eigenbasis with a real spectrum. Serves both Hermitian
/// operators (energies) and unitaries U = exp(-i mu tau) (quasienergies mu,
/// with time measured in units where U^n evolves for n * tau).
class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;
  SpectralDecomposition(Eigen::VectorXd energies, Eigen::MatrixXd real_vectors);
  SpectralDecomposition(Eigen::VectorXd energies, Eigen::MatrixXcd vectors);

  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  Eigen::Index dim() const noexcept { return energies_.size(); }
  bool has_real_vectors() const noexcept { return real_; }
  Eigen::MatrixXcd vectors() const;

  /// V^dagger x
  Eigen::MatrixXcd to_eigenbasis(const Eigen::MatrixXcd& x) const;
  /// V x
  Eigen::MatrixXcd from_eigenbasis(const Eigen::MatrixXcd& x) const;
  /// exp(-i E t) x for x given in the original basis.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& x, double t) const;
  /// V diag(f(E)) V^dagger
  template <class F>
  Eigen::MatrixXcd function(F&& f) const {
    Eigen::VectorXcd d(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) d[i] = f(energies_[i]);
    const Eigen::MatrixXcd v = vectors();
    return v * d.asDiagonal() * v.adjoint();
  }

  /// Optional symmetry-sector label per eigenvector (empty when unused).
  std::vector<int> sector_labels;

 private:
  Eigen::VectorXd energies_;
  bool real_ = false;
  Eigen::MatrixXd vr_;
  Eigen::MatrixXcd vc_;
};

/// Hermitian eigendecomposition; uses the real symmetric solver when the
/// operator is real. Throws NumericalError if the solver fails.
SpectralDecomposition diagonalize_hermitian(const CollectiveOperator& h);

/// Real orthonormal basis adapted to the parity operator, built from the
/// eigenvectors of the involution P / parity_phase. Columns with label +1
/// come first.
struct ParityBasis {
  Eigen::MatrixXd basis;
  std::vector<int> labels;
  Eigen::Index even_dim = 0;
};
ParityBasis parity_basis(const CollectiveOperator& parity);

/// Eigendecomposition of a unitary, block by block in the parity basis when
/// `parity` is given. Quasienergies mu = -arg(lambda) / tau lie in
/// (-pi/tau, pi/tau]. Throws NumericalError when U mixes parity sectors by
/// more than 1e-8 or its Schur form is not diagonal.
SpectralDecomposition diagonalize_unitary(const CollectiveOperator& u, double tau,
                                          const CollectiveOperator* parity = nullptr);

}  // namespace scramble
