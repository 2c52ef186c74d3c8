#include "scramble/collective.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

void require_spins(int n) {
  if (n < 1) throw DomainError("number of spins must be >= 1");
}

// Ladder coefficient <M+1|S_+|M> for ket index k (M = S - k), k >= 1.
double ladder(double s, int k) {
  const double m = s - k;
  return std::sqrt(std::max(0.0, s * (s + 1.0) - m * (m + 1.0)));
}

}  // namespace

DickeState DickeState::polarized_up(int n_spins) {
  require_spins(n_spins);
  DickeState st;
  st.n_spins = n_spins;
  st.amplitudes = Eigen::VectorXcd::Zero(n_spins + 1);
  st.amplitudes[0] = 1.0;
  return st;
}

DickeState DickeState::coherent(int n_spins, double theta, double phi) {
  require_spins(n_spins);
  DickeState st;
  st.n_spins = n_spins;
  st.amplitudes.resize(n_spins + 1);
  // amplitude_k = sqrt(C(N,k)) cos(th/2)^(N-k) (sin(th/2) e^{i ph})^k
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  for (int k = 0; k <= n_spins; ++k) {
    const double log_binom =
        std::lgamma(n_spins + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_spins - k + 1.0);
    double mag;
    if ((c == 0.0 && k < n_spins) || (s == 0.0 && k > 0)) {
      mag = 0.0;
    } else {
      const double lc = (n_spins - k) == 0 ? 0.0 : (n_spins - k) * std::log(std::abs(c));
      const double ls = k == 0 ? 0.0 : k * std::log(std::abs(s));
      mag = std::exp(0.5 * log_binom + lc + ls);
      if (c < 0 && ((n_spins - k) % 2)) mag = -mag;
      if (s < 0 && (k % 2)) mag = -mag;
    }
    st.amplitudes[k] = mag * std::polar(1.0, k * phi);
  }
  return st;
}

double CollectiveOperator::hermiticity_residual() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double CollectiveOperator::unitarity_residual() const {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim(), dim());
  return (matrix.adjoint() * matrix - id).cwiseAbs().maxCoeff();
}

bool CollectiveOperator::is_real() const {
  return (matrix.imag().array() == 0.0).all();
}

void CollectiveOperator::check() const {
  if (kind == OperatorKind::Hermitian && hermiticity_residual() > 1e-12)
    throw NumericalError("operator declared Hermitian is not Hermitian");
  if (kind == OperatorKind::Unitary && unitarity_residual() > 1e-10)
    throw NumericalError("operator declared unitary is not unitary");
}

const CollectiveOperator& SpinOperators::operator[](Axis a) const {
  switch (a) {
    case Axis::X: return sx;
    case Axis::Y: return sy;
    default: return sz;
  }
}

SpinOperators build_spin_operators(int n_spins) {
  require_spins(n_spins);
  const Eigen::Index d = n_spins + 1;
  const double s = 0.5 * n_spins;
  Eigen::MatrixXd splus = Eigen::MatrixXd::Zero(d, d);
  for (int k = 1; k <= n_spins; ++k) splus(k - 1, k) = ladder(s, k);
  SpinOperators ops;
  ops.sx.matrix = (0.5 * (splus + splus.transpose())).cast<cplx>();
  ops.sy.matrix = (splus - splus.transpose()).cast<cplx>() * cplx(0.0, -0.5);
  Eigen::VectorXd m(d);
  for (int k = 0; k <= n_spins; ++k) m[k] = s - k;
  ops.sz.matrix = m.cast<cplx>().asDiagonal();
  ops.sx.kind = ops.sy.kind = ops.sz.kind = OperatorKind::Hermitian;
  return ops;
}

CollectiveOperator build_lmg_hamiltonian(int n_spins, double J, double h) {
  require_spins(n_spins);
  const SpinOperators ops = build_spin_operators(n_spins);
  CollectiveOperator out;
  out.matrix = -(2.0 * J / n_spins) * ops.sz.matrix * ops.sz.matrix - 2.0 * h * ops.sx.matrix;
  out.kind = OperatorKind::Hermitian;
  return out;
}

double lmg_energy_offset(int n_spins, double J) {
  require_spins(n_spins);
  return 0.5 * J;
}

CollectiveOperator build_floquet(int n_spins, double J, double h, double K, double tau) {
  require_spins(n_spins);
  if (!(tau > 0)) throw DomainError("kick period must be positive");
  const SpectralDecomposition dec = diagonalize_hermitian(build_lmg_hamiltonian(n_spins, J, h));
  Eigen::MatrixXcd drive = dec.function([&](double e) { return std::polar(1.0, -e * tau); });
  const double s = 0.5 * n_spins;
  for (int k = 0; k <= n_spins; ++k) {
    const double m = s - k;
    drive.row(k) *= std::polar(1.0, -(2.0 * K / n_spins) * m * m);
  }
  CollectiveOperator u{std::move(drive), OperatorKind::Unitary};
  return u;
}

CollectiveOperator build_parity(int n_spins) {
  const SpinOperators ops = build_spin_operators(n_spins);
  const SpectralDecomposition dec = diagonalize_hermitian(ops.sx);
  // Eigenvalues of S_x are exactly S - k; snap them before exponentiating.
  CollectiveOperator p;
  p.matrix = dec.function([](double m) {
    const double snapped = std::round(2.0 * m) / 2.0;
    return std::polar(1.0, std::numbers::pi * snapped);
  });
  p.kind = OperatorKind::Unitary;
  return p;
}

cplx parity_phase(int n_spins) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((n_spins % 4) + 4) % 4];
}

Eigen::VectorXcd apply_spin(Axis axis, int n_spins, const Eigen::VectorXcd& x) {
  const Eigen::Index d = n_spins + 1;
  if (x.size() != d) throw DomainError("vector dimension does not match N + 1");
  const double s = 0.5 * n_spins;
  Eigen::VectorXcd y(d);
  if (axis == Axis::Z) {
    for (Eigen::Index k = 0; k < d; ++k) y[k] = (s - k) * x[k];
    return y;
  }
  // (S_+ x)_{k-1} = c_k x_k ; (S_- x)_{k} = c_k x_{k-1}
  Eigen::VectorXcd up = Eigen::VectorXcd::Zero(d), down = Eigen::VectorXcd::Zero(d);
  for (int k = 1; k <= n_spins; ++k) {
    const double c = ladder(s, k);
    up[k - 1] = c * x[k];
    down[k] = c * x[k - 1];
  }
  if (axis == Axis::X) return 0.5 * (up + down);
  return cplx(0.0, -0.5) * (up - down);
}

Eigen::VectorXd mz_diagonal(int n_spins) {
  require_spins(n_spins);
  const double s = 0.5 * n_spins;
  Eigen::VectorXd m(n_spins + 1);
  for (int k = 0; k <= n_spins; ++k) m[k] = (s - k) / s;
  return m;
}

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd energies, Eigen::MatrixXd real_vectors)
    : energies_(std::move(energies)), real_(true), vr_(std::move(real_vectors)) {}

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd energies, Eigen::MatrixXcd vectors)
    : energies_(std::move(energies)), real_(false), vc_(std::move(vectors)) {}

Eigen::MatrixXcd SpectralDecomposition::vectors() const {
  return real_ ? Eigen::MatrixXcd(vr_.cast<cplx>()) : vc_;
}

Eigen::MatrixXcd SpectralDecomposition::to_eigenbasis(const Eigen::MatrixXcd& x) const {
  if (real_) {
    Eigen::MatrixXcd out(vr_.cols(), x.cols());
    out.real().noalias() = vr_.transpose() * x.real();
    out.imag().noalias() = vr_.transpose() * x.imag();
    return out;
  }
  return vc_.adjoint() * x;
}

Eigen::MatrixXcd SpectralDecomposition::from_eigenbasis(const Eigen::MatrixXcd& x) const {
  if (real_) {
    Eigen::MatrixXcd out(vr_.rows(), x.cols());
    out.real().noalias() = vr_ * x.real();
    out.imag().noalias() = vr_ * x.imag();
    return out;
  }
  return vc_ * x;
}

Eigen::VectorXcd SpectralDecomposition::evolve(const Eigen::VectorXcd& x, double t) const {
  Eigen::VectorXcd c = to_eigenbasis(x);
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -energies_[i] * t);
  return from_eigenbasis(c);
}

SpectralDecomposition diagonalize_hermitian(const CollectiveOperator& h) {
  if (h.matrix.rows() != h.matrix.cols()) throw DomainError("operator must be square");
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix.real());
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    return SpectralDecomposition(es.eigenvalues(), Eigen::MatrixXd(es.eigenvectors()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return SpectralDecomposition(es.eigenvalues(), Eigen::MatrixXcd(es.eigenvectors()));
}

ParityBasis parity_basis(const CollectiveOperator& parity) {
  const int n = parity.n_spins();
  const Eigen::MatrixXcd inv = parity.matrix / parity_phase(n);
  const Eigen::MatrixXcd sq = inv * inv - Eigen::MatrixXcd::Identity(inv.rows(), inv.cols());
  if (sq.cwiseAbs().maxCoeff() > 1e-8 || inv.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw NumericalError("parity operator is not a real involution up to its phase");
  Eigen::MatrixXd r = inv.real();
  r = 0.5 * (r + r.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  if (es.info() != Eigen::Success) throw NumericalError("parity eigensolver failed");
  const Eigen::Index d = r.rows();
  ParityBasis out;
  out.basis.resize(d, d);
  out.labels.resize(d);
  // Eigen sorts ascending: -1 block first. Reorder so +1 comes first.
  Eigen::Index col = 0;
  for (int want : {+1, -1}) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const int lab = es.eigenvalues()[i] > 0 ? +1 : -1;
      if (std::abs(std::abs(es.eigenvalues()[i]) - 1.0) > 1e-8)
        throw NumericalError("parity eigenvalue is not +-1");
      if (lab != want) continue;
      out.basis.col(col) = es.eigenvectors().col(i);
      out.labels[col] = lab;
      ++col;
    }
    if (want == +1) out.even_dim = col;
  }
  return out;
}

namespace {

void diagonalize_block(const Eigen::MatrixXcd& block, double tau, Eigen::VectorXd& mu,
                       Eigen::MatrixXcd& vecs) {
  const Eigen::Index d = block.rows();
  mu.resize(d);
  vecs.resize(d, d);
  if (d == 0) return;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(block);
  if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  const Eigen::MatrixXcd& t = schur.matrixT();
  double off = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < j; ++i) off = std::max(off, std::abs(t(i, j)));
  if (off > 1e-8) throw NumericalError("Schur form of a unitary is not diagonal");
  vecs = schur.matrixU();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double a = std::arg(t(i, i));
    mu[i] = (a == -std::numbers::pi ? std::numbers::pi : -a) / tau;
    if (mu[i] <= -std::numbers::pi / tau) mu[i] += 2.0 * std::numbers::pi / tau;
  }
}

}  // namespace

SpectralDecomposition diagonalize_unitary(const CollectiveOperator& u, double tau,
                                          const CollectiveOperator* parity) {
  if (!(tau > 0)) throw DomainError("period must be positive");
  const Eigen::Index d = u.dim();
  if (!parity) {
    Eigen::VectorXd mu;
    Eigen::MatrixXcd v;
    diagonalize_block(u.matrix, tau, mu, v);
    return SpectralDecomposition(std::move(mu), std::move(v));
  }
  if (parity->dim() != d) throw DomainError("parity operator dimension mismatch");
  const ParityBasis pb = parity_basis(*parity);
  const Eigen::MatrixXcd ub = pb.basis.transpose().cast<cplx>() * u.matrix * pb.basis.cast<cplx>();
  const Eigen::Index e = pb.even_dim, o = d - e;
  const double leak = std::max(e > 0 && o > 0 ? ub.topRightCorner(e, o).cwiseAbs().maxCoeff() : 0.0,
                               e > 0 && o > 0 ? ub.bottomLeftCorner(o, e).cwiseAbs().maxCoeff() : 0.0);
  if (leak > 1e-8) throw NumericalError("unitary does not commute with parity");
  Eigen::VectorXd mu_e, mu_o;
  Eigen::MatrixXcd v_e, v_o;
  diagonalize_block(ub.topLeftCorner(e, e), tau, mu_e, v_e);
  diagonalize_block(ub.bottomRightCorner(o, o), tau, mu_o, v_o);
  Eigen::VectorXd mu(d);
  mu << mu_e, mu_o;
  Eigen::MatrixXcd v(d, d);
  v.leftCols(e) = pb.basis.leftCols(e).cast<cplx>() * v_e;
  v.rightCols(o) = pb.basis.rightCols(o).cast<cplx>() * v_o;
  SpectralDecomposition out(std::move(mu), std::move(v));
  out.sector_labels.assign(d, -1);
  for (Eigen::Index i = 0; i < e; ++i) out.sector_labels[i] = +1;
  return out;
}

}  // namespace scramble
