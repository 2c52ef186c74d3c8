#include "scramble/full_ed.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

constexpr int kDenseLimit = 12;
// Largest r |dt| handled by one Chebyshev series.
constexpr double kChebyshevChunk = 30.0;

void check_size(int n) {
  if (n < 1) throw DomainError("N must be positive");
  if (n > kMaxFullSpins) throw DomainError("full-space backend is limited to N <= 14");
}

void check_state(const FullState& psi) {
  check_size(psi.n_spins);
  if (psi.dim() != (Eigen::Index{1} << psi.n_spins)) throw DomainError("state length is not 2^N");
}

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// s^z_total / 2 on each basis state.
double sz_of(std::uint32_t x, int n) { return 0.5 * (n - 2 * std::popcount(x)); }

Eigen::VectorXcd apply_mz(const Eigen::VectorXcd& x, int n) {
  Eigen::VectorXcd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = x[i] * (2.0 * sz_of(static_cast<std::uint32_t>(i), n) / n);
  return y;
}

std::array<Eigen::VectorXcd, 3> apply_total_spin(const Eigen::VectorXcd& x, int n) {
  const Eigen::Index d = x.size();
  std::array<Eigen::VectorXcd, 3> s;
  s[0] = Eigen::VectorXcd::Zero(d);
  s[1] = Eigen::VectorXcd::Zero(d);
  s[2].resize(d);
  const cplx i_unit(0.0, 1.0);
  for (Eigen::Index idx = 0; idx < d; ++idx) {
    const auto u = static_cast<std::uint32_t>(idx);
    s[2][idx] = sz_of(u, n) * x[idx];
    for (int site = 0; site < n; ++site) {
      const std::uint32_t bit = 1u << site;
      const Eigen::Index j = u ^ bit;
      s[0][j] += 0.5 * x[idx];
      // s^y |up> = i |down>, s^y |down> = -i |up>
      s[1][j] += ((u & bit) ? -0.5 : 0.5) * i_unit * x[idx];
    }
  }
  return s;
}

// Rows index the bits of `mask`, columns the remaining bits.
Eigen::MatrixXcd split_matrix(const FullState& psi, SiteMask mask) {
  const int n = psi.n_spins;
  const int na = std::popcount(mask);
  Eigen::MatrixXcd m(Eigen::Index{1} << na, Eigen::Index{1} << (n - na));
  for (Eigen::Index idx = 0; idx < psi.dim(); ++idx) {
    std::uint32_t r = 0, c = 0;
    int ri = 0, ci = 0;
    for (int site = 0; site < n; ++site) {
      const std::uint32_t b = (static_cast<std::uint32_t>(idx) >> site) & 1u;
      if ((mask >> site) & 1u) r |= b << ri++;
      else c |= b << ci++;
    }
    m(r, c) = psi.amplitudes[idx];
  }
  return m;
}

double tmi_with(const std::function<double(SiteMask)>& s, const SitePartition& p) {
  return s(p.a) + s(p.b) + s(p.c) - s(p.a | p.b) - s(p.a | p.c) - s(p.b | p.c) + s(p.a | p.b | p.c);
}

}  // namespace

double kac_normalization(int n_spins, double alpha) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (std::isinf(alpha) && alpha > 0) return 1.0;
  double s = 0.0;
  for (int r = 1; r <= n_spins; ++r) s += std::pow(static_cast<double>(r), -alpha);
  return s;
}

CouplingMatrix build_couplings(int n_spins, double alpha, double J, Boundary boundary) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (std::isnan(alpha) || alpha < 0.0) throw DomainError("alpha must be non-negative");
  CouplingMatrix c;
  c.alpha = alpha;
  c.boundary = boundary;
  c.kac = kac_normalization(n_spins, alpha);
  c.j = Eigen::MatrixXd::Zero(n_spins, n_spins);
  for (int i = 0; i < n_spins; ++i)
    for (int k = 0; k < n_spins; ++k) {
      if (i == k) continue;
      int r = std::abs(i - k);
      if (boundary == Boundary::Periodic) r = std::min(r, n_spins - r);
      const double w = std::isinf(alpha) ? (r == 1 ? 1.0 : 0.0) : std::pow(static_cast<double>(r), -alpha);
      c.j(i, k) = J * w / c.kac;
    }
  return c;
}

FullState FullState::polarized_up(int n_spins) {
  check_size(n_spins);
  FullState s;
  s.n_spins = n_spins;
  s.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_spins);
  s.amplitudes[0] = 1.0;
  return s;
}

Eigen::VectorXcd FullHamiltonian::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != diagonal.size()) throw DomainError("vector length is not 2^N");
  Eigen::VectorXcd y = diagonal.cwiseProduct(x);
  if (h == 0.0) return y;
  for (Eigen::Index idx = 0; idx < x.size(); ++idx) {
    const auto u = static_cast<std::uint32_t>(idx);
    cplx acc = 0.0;
    for (int site = 0; site < n_spins; ++site) acc += x[u ^ (1u << site)];
    y[idx] -= h * acc;
  }
  return y;
}

Eigen::MatrixXd FullHamiltonian::dense() const {
  if (n_spins > kDenseLimit) throw DomainError("dense full-space Hamiltonian is limited to N <= 12");
  const Eigen::Index d = diagonal.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index idx = 0; idx < d; ++idx) {
    m(idx, idx) = diagonal[idx];
    for (int site = 0; site < n_spins; ++site) m(idx ^ (Eigen::Index{1} << site), idx) -= h;
  }
  return m;
}

std::pair<double, double> FullHamiltonian::spectral_bounds() const {
  const double off = n_spins * std::abs(h);
  return {diagonal.minCoeff() - off, diagonal.maxCoeff() + off};
}

FullHamiltonian build_longrange_hamiltonian(int n_spins, double alpha, double J, double h,
                                            Boundary boundary) {
  check_size(n_spins);
  FullHamiltonian H;
  H.n_spins = n_spins;
  H.h = h;
  H.couplings = build_couplings(n_spins, alpha, J, boundary);
  const Eigen::Index d = Eigen::Index{1} << n_spins;
  H.diagonal.resize(d);
  for (Eigen::Index idx = 0; idx < d; ++idx) {
    double e = 0.0;
    for (int i = 0; i < n_spins; ++i) {
      const double si = (idx >> i) & 1 ? -1.0 : 1.0;
      for (int k = i + 1; k < n_spins; ++k) {
        const double sk = (idx >> k) & 1 ? -1.0 : 1.0;
        e -= H.couplings.j(i, k) * si * sk;  // (1/2) sum_{i != k} = sum_{i < k}
      }
    }
    H.diagonal[idx] = e;
  }
  return H;
}

double full_ground_energy(const FullHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("full-space eigensolver failed");
  return es.eigenvalues()[0];
}

Eigen::VectorXcd full_kick_phases(int n_spins, double K) {
  check_size(n_spins);
  const Eigen::Index d = Eigen::Index{1} << n_spins;
  Eigen::VectorXcd k(d);
  for (Eigen::Index idx = 0; idx < d; ++idx) {
    const double sz = sz_of(static_cast<std::uint32_t>(idx), n_spins);
    k[idx] = std::exp(cplx(0.0, -2.0 * K / n_spins * sz * sz));
  }
  return k;
}

FullPropagator::FullPropagator(FullHamiltonian h, PropagationStrategy strategy)
    : h_(std::move(h)), strategy_(strategy) {
  check_size(h_.n_spins);
  if (strategy_ == PropagationStrategy::Auto)
    strategy_ = h_.n_spins <= kDenseMaxSpins ? PropagationStrategy::Dense : PropagationStrategy::Chebyshev;
  if (strategy_ == PropagationStrategy::Dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_.dense());
    if (es.info() != Eigen::Success) throw NumericalError("full-space eigensolver failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  } else {
    const auto [lo, hi] = h_.spectral_bounds();
    centre_ = 0.5 * (lo + hi);
    radius_ = std::max(0.5 * (hi - lo), 1e-12) * 1.01;
  }
}

Eigen::VectorXcd FullPropagator::evolve(const Eigen::VectorXcd& x, double t) const {
  if (x.size() != h_.diagonal.size()) throw DomainError("vector length is not 2^N");
  if (t == 0.0) return x;
  if (strategy_ == PropagationStrategy::Dense) {
    Eigen::VectorXcd c = vectors_.transpose() * x;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(cplx(0.0, -energies_[i] * t));
    return vectors_ * c;
  }
  const int chunks = std::max(1, static_cast<int>(std::ceil(radius_ * std::abs(t) / kChebyshevChunk)));
  Eigen::VectorXcd y = x;
  for (int i = 0; i < chunks; ++i) y = chebyshev(y, t / chunks);
  return y;
}

// exp(-iHt) x = exp(-i c t) sum_k (2 - delta_k0) (-i)^k J_k(r t) T_k((H - c)/r) x
Eigen::VectorXcd FullPropagator::chebyshev(const Eigen::VectorXcd& x, double t) const {
  const double z = radius_ * std::abs(t);
  const double sign = t < 0 ? -1.0 : 1.0;
  const auto scaled = [&](const Eigen::VectorXcd& v) { return ((h_.apply(v) - centre_ * v) / radius_).eval(); };
  Eigen::VectorXcd t_prev = x;
  Eigen::VectorXcd t_cur = scaled(x);
  Eigen::VectorXcd y = std::cyl_bessel_j(0.0, z) * x;
  cplx phase(0.0, -1.0);
  y += 2.0 * phase * (sign * std::cyl_bessel_j(1.0, z)) * t_cur;
  const int k_max = static_cast<int>(z + 10.0 * std::cbrt(z) + 40.0);
  for (int k = 2; k <= k_max; ++k) {
    Eigen::VectorXcd t_next = 2.0 * scaled(t_cur) - t_prev;
    phase *= cplx(0.0, -1.0);
    const double jk = std::cyl_bessel_j(static_cast<double>(k), z) * (k % 2 ? sign : 1.0);
    y += 2.0 * phase * jk * t_next;
    t_prev.swap(t_cur);
    t_cur.swap(t_next);
    if (k > z && std::abs(jk) < 1e-18) break;
  }
  return std::exp(cplx(0.0, -centre_ * t)) * y;
}

Eigen::VectorXcd FullFloquet::apply(const Eigen::VectorXcd& x) const {
  return kick.cwiseProduct(propagator.evolve(x, tau));
}

Eigen::VectorXcd FullFloquet::apply_inverse(const Eigen::VectorXcd& x) const {
  return propagator.evolve(kick.conjugate().cwiseProduct(x), -tau);
}

FullFloquet build_full_floquet(const FullHamiltonian& h, double K, double tau, PropagationStrategy strategy) {
  if (!(tau > 0.0)) throw DomainError("period must be positive");
  // Periods are chained, so Auto avoids the dense path.
  if (strategy == PropagationStrategy::Auto) strategy = PropagationStrategy::Chebyshev;
  return FullFloquet{FullPropagator(h, strategy), full_kick_phases(h.n_spins, K), tau};
}

std::vector<FullState> full_evolve(const FullState& psi0, const FullPropagator& prop,
                                   const std::vector<double>& times) {
  check_state(psi0);
  std::vector<FullState> out;
  out.reserve(times.size());
  // Dense steps are taken from psi0 directly: chaining them would accumulate
  // the eigenvectors' orthogonality error.
  const bool absolute = prop.strategy() == PropagationStrategy::Dense;
  FullState cur = psi0;
  double t = 0.0;
  for (double target : times) {
    cur.amplitudes = absolute ? prop.evolve(psi0.amplitudes, target) : prop.evolve(cur.amplitudes, target - t);
    t = target;
    if (std::abs(cur.norm() - 1.0) > 1e-12) throw NumericalError("full-space evolution lost normalisation");
    out.push_back(cur);
  }
  return out;
}

std::vector<FullState> full_evolve_kicked(const FullState& psi0, const FullFloquet& u, int n_periods) {
  check_state(psi0);
  if (n_periods < 0) throw DomainError("number of periods must be non-negative");
  std::vector<FullState> out{psi0};
  FullState cur = psi0;
  for (int p = 0; p < n_periods; ++p) {
    cur.amplitudes = u.apply(cur.amplitudes);
    if (std::abs(cur.norm() - 1.0) > 1e-12) throw NumericalError("full-space evolution lost normalisation");
    out.push_back(cur);
  }
  return out;
}

double full_mz(const FullState& psi) {
  check_state(psi);
  return psi.amplitudes.dot(apply_mz(psi.amplitudes, psi.n_spins)).real();
}

double full_total_spin_squared(const FullState& psi) {
  check_state(psi);
  const auto s = apply_total_spin(psi.amplitudes, psi.n_spins);
  return s[0].squaredNorm() + s[1].squaredNorm() + s[2].squaredNorm();
}

QfiResult full_qfi(const FullState& psi) {
  check_state(psi);
  const auto s = apply_total_spin(psi.amplitudes, psi.n_spins);
  QfiResult out;
  Eigen::Matrix3d cov;
  for (int a = 0; a < 3; ++a) out.mean[a] = psi.amplitudes.dot(s[a]).real();
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) cov(a, b) = cov(b, a) = s[a].dot(s[b]).real() - out.mean[a] * out.mean[b];
  for (int a = 0; a < 3; ++a) out.variance[a] = cov(a, a);
  out.fq = 4.0 * *std::max_element(out.variance.begin(), out.variance.end());
  out.density = out.fq / psi.n_spins;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  out.fq_covariance = 4.0 * es.eigenvalues().maxCoeff();
  return out;
}

TimeSeriesRecord full_square_commutator(const FullState& psi0, const FullPropagator& prop,
                                        const std::vector<double>& times) {
  check_state(psi0);
  const int n = psi0.n_spins;
  TimeSeriesRecord r;
  r.label = "c";
  r.set_meta("N", static_cast<double>(n));
  const bool absolute = prop.strategy() == PropagationStrategy::Dense;
  const Eigen::VectorXcd b0 = apply_mz(psi0.amplitudes, n);
  Eigen::VectorXcd psi = psi0.amplitudes;
  Eigen::VectorXcd b = b0;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw DomainError("sample times must be non-decreasing");
    psi = absolute ? prop.evolve(psi0.amplitudes, target) : prop.evolve(psi, target - t);
    b = absolute ? prop.evolve(b0, target) : prop.evolve(b, target - t);
    t = target;
    const Eigen::VectorXcd u1 = prop.evolve(apply_mz(b, n), -t);                 // m_z(t) m_z psi0
    const Eigen::VectorXcd u2 = apply_mz(prop.evolve(apply_mz(psi, n), -t), n);  // m_z m_z(t) psi0
    r.push(t, (u1 - u2).squaredNorm());
  }
  return r;
}

TimeSeriesRecord full_square_commutator_kicked(const FullState& psi0, const FullFloquet& u, int n_periods) {
  check_state(psi0);
  if (n_periods < 0) throw DomainError("number of periods must be non-negative");
  const int n = psi0.n_spins;
  TimeSeriesRecord r;
  r.label = "c";
  r.set_meta("N", static_cast<double>(n));
  Eigen::VectorXcd psi = psi0.amplitudes;
  Eigen::VectorXcd b = apply_mz(psi0.amplitudes, n);
  for (int p = 0; p <= n_periods; ++p) {
    if (p > 0) {
      psi = u.apply(psi);
      b = u.apply(b);
    }
    Eigen::VectorXcd u1 = apply_mz(b, n);
    Eigen::VectorXcd u2 = apply_mz(psi, n);
    for (int q = 0; q < p; ++q) {
      u1 = u.apply_inverse(u1);
      u2 = u.apply_inverse(u2);
    }
    r.push(p * u.tau, (u1 - apply_mz(u2, n)).squaredNorm());
  }
  return r;
}

SiteMask site_range(int first, int count) {
  if (first < 0 || count < 0 || first + count > 32) throw DomainError("site range out of bounds");
  SiteMask m = 0;
  for (int i = 0; i < count; ++i) m |= SiteMask{1} << (first + i);
  return m;
}

Eigen::MatrixXcd full_reduced_density_matrix(const FullState& psi, SiteMask mask) {
  check_state(psi);
  const SiteMask all = static_cast<SiteMask>((Eigen::Index{1} << psi.n_spins) - 1);
  if (mask & ~all) throw DomainError("site mask exceeds the chain");
  const Eigen::MatrixXcd m = split_matrix(psi, mask);
  return m * m.adjoint();
}

double full_entropy(const FullState& psi, SiteMask mask) {
  check_state(psi);
  const SiteMask all = static_cast<SiteMask>((Eigen::Index{1} << psi.n_spins) - 1);
  if (mask & ~all) throw DomainError("site mask exceeds the chain");
  if (2 * std::popcount(mask) > psi.n_spins) mask = all & ~mask;
  if (mask == 0) return 0.0;
  const Eigen::MatrixXcd m = split_matrix(psi, mask);
  const Eigen::MatrixXcd rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("reduced density matrix eigensolver failed");
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-14) s -= l * std::log(l);
  }
  return std::max(0.0, s);
}

void SitePartition::validate(int n_spins) const {
  check_size(n_spins);
  const SiteMask all = static_cast<SiteMask>((Eigen::Index{1} << n_spins) - 1);
  if (a == 0 || b == 0 || c == 0) throw DomainError("blocks A, B, C must be non-empty");
  if ((a & b) || (a & c) || (b & c)) throw DomainError("blocks must be disjoint");
  if ((a | b | c) & ~all) throw DomainError("block exceeds the chain");
  if ((a | b | c) == all) throw DomainError("block D must be non-empty");
}

double partition_tmi(const FullState& psi, const SitePartition& part) {
  part.validate(psi.n_spins);
  return tmi_with([&](SiteMask m) { return full_entropy(psi, m); }, part);
}

TmiMinimum min_tmi(const FullState& psi, PartitionScan scan) {
  check_state(psi);
  const int n = psi.n_spins;
  if (n < 4) throw DomainError("a four-block partition needs N >= 4");
  if (scan == PartitionScan::All && n > 10) throw DomainError("the full partition scan is limited to N <= 10");
  std::vector<double> cache(std::size_t{1} << n, std::numeric_limits<double>::quiet_NaN());
  const auto s = [&](SiteMask m) {
    double& v = cache[m];
    if (std::isnan(v)) v = full_entropy(psi, m);
    return v;
  };
  TmiMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  const auto consider = [&](const SitePartition& p) {
    const double v = tmi_with(s, p);
    ++best.partitions_scanned;
    if (v < best.value) {
      best.value = v;
      best.partition = p;
    }
  };
  if (scan == PartitionScan::Contiguous) {
    // For a pure state I3 is symmetric under exchanging D with A, B or C, so
    // consecutive A, B, C with D as the remainder covers every ordering.
    for (int p0 = 0; p0 < n; ++p0)
      for (int p1 = p0 + 1; p1 < n; ++p1)
        for (int p2 = p1 + 1; p2 < n; ++p2)
          for (int p3 = p2 + 1; p3 <= n; ++p3) {
            if (p3 - p0 >= n) continue;
            consider({site_range(p0, p1 - p0), site_range(p1, p2 - p1), site_range(p2, p3 - p2)});
          }
  } else {
    std::vector<int> label(static_cast<std::size_t>(n), 0);
    const std::size_t total = std::size_t{1} << (2 * n);
    for (std::size_t code = 0; code < total; ++code) {
      SitePartition p;
      SiteMask d = 0;
      for (int i = 0; i < n; ++i) {
        const int l = static_cast<int>((code >> (2 * i)) & 3u);
        const SiteMask bit = SiteMask{1} << i;
        if (l == 0) p.a |= bit;
        else if (l == 1) p.b |= bit;
        else if (l == 2) p.c |= bit;
        else d |= bit;
      }
      if (p.a == 0 || p.b == 0 || p.c == 0 || d == 0) continue;
      consider(p);
    }
  }
  return best;
}

FullState embed_dicke(const DickeState& psi) {
  check_size(psi.n_spins);
  if (psi.dim() != psi.n_spins + 1) throw DomainError("Dicke state length is not N + 1");
  const int n = psi.n_spins;
  FullState out;
  out.n_spins = n;
  out.amplitudes.resize(Eigen::Index{1} << n);
  for (Eigen::Index idx = 0; idx < out.dim(); ++idx) {
    const int k = std::popcount(static_cast<std::uint32_t>(idx));
    out.amplitudes[idx] = psi.amplitudes[k] * std::exp(-0.5 * log_binom(n, k));
  }
  return out;
}

DickeState project_to_dicke(const FullState& psi) {
  check_state(psi);
  const int n = psi.n_spins;
  DickeState out;
  out.n_spins = n;
  out.amplitudes = Eigen::VectorXcd::Zero(n + 1);
  for (Eigen::Index idx = 0; idx < psi.dim(); ++idx)
    out.amplitudes[std::popcount(static_cast<std::uint32_t>(idx))] += psi.amplitudes[idx];
  for (int k = 0; k <= n; ++k) out.amplitudes[k] *= std::exp(-0.5 * log_binom(n, k));
  return out;
}

Eigen::MatrixXcd restrict_to_symmetric(int n_spins,
                                       const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op) {
  check_size(n_spins);
  Eigen::MatrixXcd m(n_spins + 1, n_spins + 1);
  DickeState e;
  e.n_spins = n_spins;
  for (int k = 0; k <= n_spins; ++k) {
    e.amplitudes = Eigen::VectorXcd::Unit(n_spins + 1, k);
    FullState y;
    y.n_spins = n_spins;
    y.amplitudes = op(embed_dicke(e).amplitudes);
    m.col(k) = project_to_dicke(y).amplitudes;
  }
  return m;
}

}  // namespace scramble
