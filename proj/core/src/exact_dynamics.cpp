#include "scramble/exact_dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "scramble/errors.hpp"
#include "scramble/parallel.hpp"

namespace scramble {

namespace {

constexpr Eigen::Index kDenseCommutatorMaxDim = 33;
constexpr std::size_t kTimeChunk = 128;

void check_normalized(const DickeState& psi) {
  if (psi.amplitudes.size() != psi.n_spins + 1)
    throw DomainError("Dicke state length must be N + 1");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw DomainError("state is not normalized");
}

// Real or complex left factor times a complex block.
Eigen::MatrixXcd mul(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd out(a.rows(), x.cols());
  out.real().noalias() = a * x.real();
  out.imag().noalias() = a * x.imag();
  return out;
}

}  // namespace

void QuenchPlan::validate() const {
  if (times.empty() || times.front() != 0.0) throw DomainError("quench times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("quench times must increase strictly");
}

DickeState ground_state(int n_spins, double J, double h0) {
  if (h0 == 0.0) return DickeState::polarized_up(n_spins);
  const SpectralDecomposition dec = diagonalize_hermitian(build_lmg_hamiltonian(n_spins, J, h0));
  DickeState st;
  st.n_spins = n_spins;
  st.amplitudes = dec.vectors().col(0);
  // Fix the global phase so the largest component is real positive.
  Eigen::Index imax = 0;
  st.amplitudes.cwiseAbs().maxCoeff(&imax);
  st.amplitudes *= std::conj(st.amplitudes[imax]) / std::abs(st.amplitudes[imax]);
  return st;
}

Eigen::MatrixXcd evolve_columns(const Eigen::VectorXcd& psi0, const SpectralDecomposition& gen,
                                const std::vector<double>& times) {
  const Eigen::VectorXcd c = gen.to_eigenbasis(psi0);
  const Eigen::VectorXd& e = gen.energies();
  Eigen::MatrixXcd phased(c.size(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t j = 0; j < times.size(); ++j)
    for (Eigen::Index i = 0; i < c.size(); ++i)
      phased(i, static_cast<Eigen::Index>(j)) = c[i] * std::polar(1.0, -e[i] * times[j]);
  return gen.from_eigenbasis(phased);
}

std::vector<DickeState> evolve_quench(const DickeState& psi0, const CollectiveOperator& H,
                                      const std::vector<double>& times) {
  check_normalized(psi0);
  if (H.dim() != psi0.dim()) throw DomainError("Hamiltonian and state dimensions differ");
  if (H.hermiticity_residual() > 1e-12) throw DomainError("quench generator must be Hermitian");
  const SpectralDecomposition dec = diagonalize_hermitian(H);
  const Eigen::MatrixXcd cols = evolve_columns(psi0.amplitudes, dec, times);
  std::vector<DickeState> out(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    out[j].n_spins = psi0.n_spins;
    out[j].amplitudes = cols.col(static_cast<Eigen::Index>(j));
    if (std::abs(out[j].norm() - 1.0) > 1e-12) throw NumericalError("norm drift in quench evolution");
  }
  return out;
}

std::vector<DickeState> evolve_kicked(const DickeState& psi0, const CollectiveOperator& U,
                                      int n_periods) {
  check_normalized(psi0);
  if (n_periods < 0) throw DomainError("number of periods must be non-negative");
  if (U.dim() != psi0.dim()) throw DomainError("Floquet operator and state dimensions differ");
  if (U.unitarity_residual() > 1e-10) throw DomainError("Floquet operator must be unitary");
  std::vector<DickeState> out;
  out.reserve(static_cast<std::size_t>(n_periods) + 1);
  out.push_back(psi0);
  for (int n = 0; n < n_periods; ++n) {
    DickeState next{psi0.n_spins, U.matrix * out.back().amplitudes};
    next.amplitudes /= next.norm();
    out.push_back(std::move(next));
  }
  return out;
}

TimeSeriesRecord square_commutator(const DickeState& psi0, const SpectralDecomposition& gen,
                                   const std::vector<double>& times, CommutatorStrategy strategy) {
  check_normalized(psi0);
  const Eigen::Index d = psi0.dim();
  if (gen.dim() != d) throw DomainError("generator and state dimensions differ");
  const Eigen::VectorXd mz = mz_diagonal(psi0.n_spins);
  const Eigen::VectorXd& e = gen.energies();
  if (strategy == CommutatorStrategy::Auto)
    strategy = d <= kDenseCommutatorMaxDim ? CommutatorStrategy::Dense : CommutatorStrategy::VectorChain;

  TimeSeriesRecord rec;
  rec.label = "c";
  rec.times = times;
  rec.values.assign(times.size(), 0.0);
  rec.set_meta("N", static_cast<double>(psi0.n_spins));
  rec.set_meta("strategy", strategy == CommutatorStrategy::Dense ? "dense" : "vector-chain");

  const Eigen::MatrixXcd v = gen.vectors();
  if (strategy == CommutatorStrategy::Dense) {
    const Eigen::MatrixXcd a_eig = v.adjoint() * mz.cast<cplx>().asDiagonal() * v;
    for (std::size_t j = 0; j < times.size(); ++j) {
      Eigen::VectorXcd ph(d);
      for (Eigen::Index i = 0; i < d; ++i) ph[i] = std::polar(1.0, e[i] * times[j]);
      const Eigen::MatrixXcd at =
          v * (ph.asDiagonal() * a_eig * ph.conjugate().asDiagonal()) * v.adjoint();
      const Eigen::MatrixXcd comm = at * mz.cast<cplx>().asDiagonal() - mz.cast<cplx>().asDiagonal() * at;
      const cplx val = -(psi0.amplitudes.adjoint() * (comm * comm) * psi0.amplitudes)(0, 0);
      if (std::abs(val.imag()) > 1e-8) throw NumericalError("square commutator has an imaginary part");
      if (val.real() < -1e-12) throw NumericalError("square commutator is negative");
      rec.values[j] = std::max(0.0, val.real());
    }
    return rec;
  }

  // Vector chains in the eigenbasis: C psi = A(t) B psi - B A(t) psi with
  // A(t) x = V e^{iEt} A~ e^{-iEt} V^dagger x and A~ = V^dagger m_z V.
  const Eigen::VectorXcd u1 = gen.to_eigenbasis(mz.cast<cplx>().cwiseProduct(psi0.amplitudes));
  const Eigen::VectorXcd u2 = gen.to_eigenbasis(psi0.amplitudes);
  Eigen::MatrixXd a_real;
  Eigen::MatrixXcd a_cplx;
  if (gen.has_real_vectors()) {
    const Eigen::MatrixXd vr = v.real();
    a_real = vr.transpose() * mz.asDiagonal() * vr;
  } else {
    a_cplx = v.adjoint() * mz.cast<cplx>().asDiagonal() * v;
  }
  const std::size_t n_chunks = (times.size() + kTimeChunk - 1) / kTimeChunk;
  parallel_for(n_chunks, resolve_thread_count(), [&](std::size_t chunk) {
    const std::size_t lo = chunk * kTimeChunk;
    const std::size_t hi = std::min(times.size(), lo + kTimeChunk);
    const auto m = static_cast<Eigen::Index>(hi - lo);
    Eigen::MatrixXcd x(d, 2 * m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double t = times[lo + static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < d; ++i) {
        const cplx ph = std::polar(1.0, -e[i] * t);
        x(i, j) = ph * u1[i];
        x(i, m + j) = ph * u2[i];
      }
    }
    Eigen::MatrixXcd y = gen.has_real_vectors() ? mul(a_real, x) : Eigen::MatrixXcd(a_cplx * x);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double t = times[lo + static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < d; ++i) {
        const cplx ph = std::polar(1.0, e[i] * t);
        y(i, j) *= ph;
        y(i, m + j) *= ph;
      }
    }
    const Eigen::MatrixXcd w = gen.from_eigenbasis(y);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::VectorXcd r = w.col(j) - mz.cast<cplx>().cwiseProduct(w.col(m + j));
      rec.values[lo + static_cast<std::size_t>(j)] = r.squaredNorm();
    }
  });
  return rec;
}

QfiResult qfi(const DickeState& psi) {
  check_normalized(psi);
  const int n = psi.n_spins;
  std::array<Eigen::VectorXcd, 3> s;
  for (int a = 0; a < 3; ++a) s[a] = apply_spin(static_cast<Axis>(a), n, psi.amplitudes);
  QfiResult out;
  Eigen::Matrix3d cov;
  for (int a = 0; a < 3; ++a) out.mean[a] = psi.amplitudes.dot(s[a]).real();
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      cov(a, b) = cov(b, a) = s[a].dot(s[b]).real() - out.mean[a] * out.mean[b];
    }
  for (int a = 0; a < 3; ++a) out.variance[a] = cov(a, a);
  out.fq = 4.0 * *std::max_element(out.variance.begin(), out.variance.end());
  out.density = out.fq / n;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  out.fq_covariance = 4.0 * es.eigenvalues().maxCoeff();
  return out;
}

cplx two_time_correlator(const DickeState& psi0, const CollectiveOperator& A,
                         const CollectiveOperator& B, const SpectralDecomposition& gen, double t) {
  check_normalized(psi0);
  if (A.dim() != psi0.dim() || B.dim() != psi0.dim() || gen.dim() != psi0.dim())
    throw DomainError("operator dimensions differ from the state");
  const Eigen::VectorXcd fwd = gen.evolve(psi0.amplitudes, t);
  const Eigen::VectorXcd back = gen.evolve(B.matrix * fwd, -t);
  return psi0.amplitudes.dot(A.matrix * back);
}

double detect_revival(const TimeSeriesRecord& mz, double t_min, double fraction) {
  mz.validate();
  if (mz.size() < 3) throw DomainError("series too short for revival detection");
  double baseline = 0.0;
  for (double v : mz.values) baseline += v;
  baseline /= static_cast<double>(mz.size());
  double a0 = 0.0;
  for (std::size_t i = 0; i < mz.size() && mz.times[i] <= t_min; ++i)
    a0 = std::max(a0, std::abs(mz.values[i] - baseline));
  if (a0 == 0.0) return -1.0;
  const double level = fraction * a0;
  // The envelope is a running maximum over one window of length t_min / 2:
  // long enough to span several oscillation periods of the local signal.
  const double window = 0.5 * t_min;
  bool dropped = false;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < mz.size(); ++i) {
    const double t = mz.times[i];
    if (t <= t_min) continue;
    const double dev = std::abs(mz.values[i] - baseline);
    if (dropped && dev >= level) return t;
    while (mz.times[lo] < t - window) ++lo;
    double env = 0.0;
    for (std::size_t k = lo; k <= i; ++k) env = std::max(env, std::abs(mz.values[k] - baseline));
    if (!dropped && env < level && t - window > t_min) dropped = true;
  }
  return -1.0;
}

}  // namespace scramble
