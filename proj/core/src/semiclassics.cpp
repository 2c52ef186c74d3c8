#include "scramble/semiclassics.hpp"

#include <algorithm>
#include <cmath>

#include "scramble/errors.hpp"
#include "scramble/ode.hpp"
#include "scramble/parallel.hpp"

namespace scramble {

namespace {

constexpr double kTangentLimit = 1e150;

using Spins = Eigen::Matrix<double, 3, Eigen::Dynamic>;

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("sample times must be non-negative");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample times must be non-decreasing");
  }
}

long period_index(double t, double tau) {
  const double x = t / tau;
  const double n = std::round(x);
  if (std::abs(x - n) > 1e-9 * std::max(1.0, std::abs(x)))
    throw DomainError("kicked dynamics is stroboscopic: times must be multiples of tau");
  return static_cast<long>(n);
}

// Block-ordered reduction: f(i, acc) adds sample i into acc. Sums are formed
// per fixed block in index order and then combined in block order.
template <class F>
std::vector<double> block_reduce(std::size_t n, std::size_t width, std::size_t threads, F&& f) {
  const std::size_t nb = reduction_blocks(n);
  std::vector<std::vector<double>> partial(nb, std::vector<double>(width, 0.0));
  parallel_for(nb, resolve_thread_count(threads), [&](std::size_t b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    for (std::size_t i = lo; i < hi; ++i) f(i, partial[b]);
  });
  std::vector<double> total(width, 0.0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < width; ++k) total[k] += p[k];
  return total;
}

// Effective mean-field problem: either N individual sites or a handful of
// species with multiplicities. B^z = G s^z, kick angle = 2 Gk s^z.
struct MeanField {
  Eigen::MatrixXd g;
  Eigen::MatrixXd gk;
  bool uniform = false;  // g = j_over_n (1 - I) on N sites, evaluated in O(N)
  double j_over_n = 0.0;
  double k_over_n = 0.0;
  bool kicked = false;
  double h = 0.0;

  Eigen::VectorXd field(const Eigen::VectorXd& sz) const {
    if (uniform) return j_over_n * (Eigen::VectorXd::Constant(sz.size(), sz.sum()) - sz);
    return g * sz;
  }
  Eigen::VectorXd kick_angle(const Eigen::VectorXd& sz) const {
    if (uniform) return 2.0 * k_over_n * (Eigen::VectorXd::Constant(sz.size(), sz.sum()) - sz);
    return 2.0 * (gk * sz);
  }
};

Spins rhs(const MeanField& mf, const Spins& x) {
  const Eigen::VectorXd bz = mf.field(x.row(2).transpose());
  Spins f(3, x.cols());
  f.row(0) = 2.0 * x.row(1).cwiseProduct(bz.transpose());
  f.row(1) = 2.0 * (mf.h * x.row(2) - x.row(0).cwiseProduct(bz.transpose()));
  f.row(2) = -2.0 * mf.h * x.row(1);
  return f;
}

// Tangent columns: `cols` holds k stacked 3 x n blocks side by side.
Eigen::MatrixXd rhs_tangent_block(const MeanField& mf, const Spins& x, const Eigen::VectorXd& bz,
                                  const Eigen::MatrixXd& cols) {
  const Eigen::Index n = x.cols(), k = cols.cols();
  Eigen::MatrixXd vz(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index i = 0; i < n; ++i) vz(i, c) = cols(3 * i + 2, c);
  Eigen::MatrixXd dbz;
  if (mf.uniform)
    dbz = mf.j_over_n * (Eigen::VectorXd::Ones(n) * vz.colwise().sum() - vz);
  else
    dbz = mf.g * vz;
  Eigen::MatrixXd out(cols.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double vx = cols(3 * i, c), vy = cols(3 * i + 1, c), v3 = vz(i, c);
      const double d = dbz(i, c);
      out(3 * i, c) = 2.0 * (vy * bz[i] + x(1, i) * d);
      out(3 * i + 1, c) = 2.0 * (mf.h * v3 - vx * bz[i] - x(0, i) * d);
      out(3 * i + 2, c) = -2.0 * mf.h * vy;
    }
  }
  return out;
}

void rk4(const MeanField& mf, Spins& x, double dt) {
  const Spins k1 = rhs(mf, x);
  const Spins k2 = rhs(mf, x + 0.5 * dt * k1);
  const Spins k3 = rhs(mf, x + 0.5 * dt * k2);
  const Spins k4 = rhs(mf, x + dt * k3);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// RK4 for positions with tangents. `Tan` is Spins (one direction) or a matrix
// of stacked directions.
template <class Tan, class TanRhs>
void rk4(const MeanField& mf, Spins& x, Tan& v, double dt, const TanRhs& tan_rhs) {
  const Eigen::VectorXd b1 = mf.field(x.row(2).transpose());
  const Spins k1 = rhs(mf, x);
  const Tan l1 = tan_rhs(mf, x, b1, v);
  const Spins x2 = x + 0.5 * dt * k1;
  const Tan v2 = v + 0.5 * dt * l1;
  const Spins k2 = rhs(mf, x2);
  const Tan l2 = tan_rhs(mf, x2, mf.field(x2.row(2).transpose()), v2);
  const Spins x3 = x + 0.5 * dt * k2;
  const Tan v3 = v + 0.5 * dt * l2;
  const Spins k3 = rhs(mf, x3);
  const Tan l3 = tan_rhs(mf, x3, mf.field(x3.row(2).transpose()), v3);
  const Spins x4 = x + dt * k3;
  const Tan v4 = v + dt * l3;
  const Spins k4 = rhs(mf, x4);
  const Tan l4 = tan_rhs(mf, x4, mf.field(x4.row(2).transpose()), v4);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  v += (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

void apply_kick(const MeanField& mf, Spins& x) {
  const Eigen::VectorXd th = mf.kick_angle(x.row(2).transpose());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double c = std::cos(th[i]), s = std::sin(th[i]);
    const double a = x(0, i), b = x(1, i);
    x(0, i) = c * a - s * b;
    x(1, i) = s * a + c * b;
  }
}

// Kick with a tangent: v is 3 x n per direction, stacked as columns of `cols`
// (each column a flattened 3 x n block).
void apply_kick(const MeanField& mf, Spins& x, Eigen::MatrixXd& cols) {
  const Eigen::Index n = x.cols();
  const Eigen::VectorXd th = mf.kick_angle(x.row(2).transpose());
  apply_kick(mf, x);
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    Eigen::Map<Spins> v(cols.col(c).data(), 3, n);
    const Eigen::VectorXd dth = mf.kick_angle(v.row(2).transpose());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double cs = std::cos(th[i]), sn = std::sin(th[i]);
      const double a = v(0, i), b = v(1, i);
      v(0, i) = cs * a - sn * b - dth[i] * x(1, i);
      v(1, i) = sn * a + cs * b + dth[i] * x(0, i);
    }
  }
}

void flow(const MeanField& mf, Spins& x, double span, double dt) {
  const std::size_t n = ode::substeps(0.0, span, dt);
  if (n == 0) return;
  const double step = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) rk4(mf, x, step);
}

void flow(const MeanField& mf, Spins& x, Eigen::MatrixXd& cols, double span, double dt) {
  const std::size_t n = ode::substeps(0.0, span, dt);
  if (n == 0) return;
  const double step = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) rk4(mf, x, cols, step, rhs_tangent_block);
}

// Propagates x (and optional tangent columns) from t0 to t1.
struct Propagator {
  const MeanField& mf;
  double tau;
  double dt;

  void advance(Spins& x, Eigen::MatrixXd* cols, double t0, double t1) const {
    if (!mf.kicked) {
      if (cols) flow(mf, x, *cols, t1 - t0, dt);
      else flow(mf, x, t1 - t0, dt);
      return;
    }
    const long n0 = period_index(t0, tau), n1 = period_index(t1, tau);
    for (long p = n0; p < n1; ++p) {
      if (cols) {
        flow(mf, x, *cols, tau, dt);
        apply_kick(mf, x, *cols);
      } else {
        flow(mf, x, tau, dt);
        apply_kick(mf, x);
      }
    }
  }
};

MeanField per_site_field(const DtwaModel& model) {
  MeanField mf;
  mf.h = model.h;
  mf.kicked = model.kicked();
  if (model.all_to_all) {
    const double n = model.n_spins();
    mf.uniform = true;
    mf.j_over_n = model.J / n;
    mf.k_over_n = model.K / n;
  } else {
    mf.g = model.couplings;
    mf.gk = model.kick;
  }
  return mf;
}

// Two species with multiplicities (na, nb) under uniform couplings.
MeanField species_field(const DtwaModel& model, double na, double nb) {
  MeanField mf;
  mf.h = model.h;
  mf.kicked = model.kicked();
  const double n = model.n_spins();
  Eigen::Matrix2d shape;
  shape << na - 1.0, nb, na, nb - 1.0;
  mf.g = (model.J / n) * shape;
  mf.gk = (model.K / n) * shape;
  return mf;
}

// Per-time accumulator layout.
constexpr std::size_t kMz = 0;
constexpr std::size_t kSum = 1;     // 3: sum_i s^a_i
constexpr std::size_t kOuter = 4;   // 6: (sum s^a)(sum s^b), a <= b
constexpr std::size_t kSelf = 10;   // 6: sum_i s^a_i s^b_i
constexpr std::size_t kD2 = 16;
constexpr std::size_t kWidth = 17;

constexpr int kPairA[6] = {0, 0, 0, 1, 1, 2};
constexpr int kPairB[6] = {0, 1, 2, 1, 2, 2};

void observe(const Spins& x, const Eigen::VectorXd& w, double n_spins, double* out) {
  const Eigen::Vector3d sum = x * w;
  out[kMz] = sum[2] / n_spins;
  for (int a = 0; a < 3; ++a) out[kSum + a] = sum[a];
  for (int p = 0; p < 6; ++p) {
    const int a = kPairA[p], b = kPairB[p];
    out[kOuter + p] = sum[a] * sum[b];
    out[kSelf + p] = (x.row(a).cwiseProduct(x.row(b))).dot(w.transpose());
  }
}

double qfi_density_from_means(const double* mean, double n_spins) {
  Eigen::Matrix3d cov;
  for (int p = 0; p < 6; ++p) {
    const int a = kPairA[p], b = kPairB[p];
    const double ss = 0.25 * ((a == b ? n_spins : 0.0) + mean[kOuter + p] - mean[kSelf + p]);
    const double v = ss - 0.25 * mean[kSum + a] * mean[kSum + b];
    cov(a, b) = v;
    cov(b, a) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  return 4.0 * es.eigenvalues().maxCoeff() / n_spins;
}

Spins rotation_seed(const Spins& x) {
  Spins v = Spins::Zero(3, x.cols());
  v.row(0) = -x.row(1);
  v.row(1) = x.row(0);
  return v;
}

}  // namespace

std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<TwaSample> twa_sample(int n_spins, std::size_t n_samples, std::uint64_t seed) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (n_samples < 1) throw DomainError("need at least one sample");
  const double sigma = 1.0 / std::sqrt(static_cast<double>(n_spins));
  std::vector<TwaSample> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto rng = sample_stream(seed, i);
    std::normal_distribution<double> gauss(0.0, sigma);
    double x = 0.0, y = 0.0;
    do {
      x = gauss(rng);
      y = gauss(rng);
    } while (x * x + y * y > 1.0);
    out[i].m0 = BlochVector(x, y, std::sqrt(1.0 - x * x - y * y));
    out[i].weight = 1.0 / static_cast<double>(n_samples);
  }
  return out;
}

BlochTrajectory evolve_sample(const BlochVector& m0, const SemiclassicalDynamics& dyn,
                              const std::vector<double>& times, bool with_tangent) {
  check_times(times);
  if (!dyn.kicked()) return integrate_flow(m0, dyn.J, dyn.h, times, dyn.dt, with_tangent);
  if (!(dyn.tau > 0.0)) throw DomainError("period tau must be positive");
  const KickParams p = dyn.kick_params();
  BlochTrajectory tr;
  tr.times = times;
  BlochVector m = m0;
  Eigen::Matrix3d w = Eigen::Matrix3d::Identity();
  long done = 0;
  for (double t : times) {
    const long target = period_index(t, dyn.tau);
    for (; done < target; ++done) m = with_tangent ? kicked_map(m, p, w) : kicked_map(m, p);
    tr.m.push_back(m);
    if (with_tangent) tr.tangent.push_back(w);
  }
  return tr;
}

TimeSeriesRecord twa_observable(const std::vector<TwaSample>& samples,
                                const SemiclassicalDynamics& dyn, const std::vector<double>& times,
                                const std::function<double(const BlochVector&)>& f,
                                std::size_t threads) {
  check_times(times);
  const std::size_t nt = times.size();
  const auto total = block_reduce(samples.size(), nt + 1, threads, [&](std::size_t i, std::vector<double>& acc) {
    const BlochTrajectory tr = evolve_sample(samples[i].m0, dyn, times);
    for (std::size_t k = 0; k < nt; ++k) acc[k] += samples[i].weight * f(tr.m[k]);
    acc[nt] += samples[i].weight;
  });
  TimeSeriesRecord r;
  r.label = "twa";
  r.set_meta("n_samples", static_cast<double>(samples.size()));
  for (std::size_t k = 0; k < nt; ++k) r.push(times[k], total[k] / total[nt]);
  return r;
}

TimeSeriesRecord twa_square_commutator(const std::vector<TwaSample>& samples, int n_spins,
                                       const SemiclassicalDynamics& dyn,
                                       const std::vector<double>& times, double calibration,
                                       std::size_t threads) {
  if (n_spins < 1) throw DomainError("N must be positive");
  check_times(times);
  const std::size_t nt = times.size();
  // acc[0..nt) weighted bracket^2, acc[nt] kept weight, acc[nt+1] flagged count
  const auto total = block_reduce(samples.size(), nt + 2, threads, [&](std::size_t i, std::vector<double>& acc) {
    const BlochVector& m0 = samples[i].m0;
    const BlochTrajectory tr = evolve_sample(m0, dyn, times, true);
    std::vector<double> b2(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      const Eigen::Matrix3d& w = tr.tangent[k];
      const double b = m0.x() * w(2, 1) - m0.y() * w(2, 0);
      if (!std::isfinite(b) || std::abs(b) > kTangentLimit) {
        acc[nt + 1] += 1.0;
        return;
      }
      b2[k] = b * b;
    }
    for (std::size_t k = 0; k < nt; ++k) acc[k] += samples[i].weight * b2[k];
    acc[nt] += samples[i].weight;
  });
  if (!(total[nt] > 0.0)) throw NumericalError("every TWA sample overflowed its tangent map");
  const double n = n_spins;
  TimeSeriesRecord r;
  r.label = "c";
  r.set_meta("N", n);
  r.set_meta("calibration", calibration);
  r.set_meta("flagged_samples", total[nt + 1]);
  for (std::size_t k = 0; k < nt; ++k)
    r.push(times[k], calibration * 4.0 / (n * n) * total[k] / total[nt]);
  return r;
}

DiscreteSpinEnsemble dtwa_sample(int n_spins, std::size_t n_samples, std::uint64_t seed) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (n_samples < 1) throw DomainError("need at least one sample");
  DiscreteSpinEnsemble e;
  e.n_spins = n_spins;
  e.n_samples = n_samples;
  e.seed = seed;
  e.configs.resize(3 * static_cast<std::size_t>(n_spins) * n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto rng = sample_stream(seed, s);
    auto x = e.sample(s);
    std::uint64_t word = 0;
    for (int i = 0; i < n_spins; ++i) {
      if (i % 64 == 0) word = rng();
      const double v = ((word >> (i % 64)) & 1u) ? 1.0 : -1.0;
      x(0, i) = v;
      x(1, i) = v;
      x(2, i) = 1.0;
    }
  }
  return e;
}

void DtwaModel::validate() const {
  const Eigen::Index n = couplings.rows();
  if (n < 1 || couplings.cols() != n) throw DomainError("couplings must be a non-empty square matrix");
  if ((couplings - couplings.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("couplings must be symmetric");
  if (couplings.diagonal().cwiseAbs().maxCoeff() != 0.0) throw DomainError("couplings must have zero diagonal");
  if (kick.size() != 0 && (kick.rows() != n || kick.cols() != n))
    throw DomainError("kick matrix must match the couplings");
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
  if (kicked() && !(tau > 0.0)) throw DomainError("period tau must be positive");
}

DtwaModel dtwa_all_to_all(int n_spins, double J, double h, double K, double tau, double dt) {
  if (n_spins < 1) throw DomainError("N must be positive");
  DtwaModel m;
  const double n = n_spins;
  m.couplings = Eigen::MatrixXd::Constant(n_spins, n_spins, J / n);
  m.couplings.diagonal().setZero();
  if (K != 0.0) {
    m.kick = Eigen::MatrixXd::Constant(n_spins, n_spins, K / n);
    m.kick.diagonal().setZero();
  }
  m.h = h;
  m.tau = tau;
  m.dt = dt;
  m.all_to_all = true;
  m.J = J;
  m.K = K;
  m.validate();
  return m;
}

DtwaModel dtwa_with_couplings(const Eigen::MatrixXd& couplings, double h, double dt) {
  DtwaModel m;
  m.couplings = couplings;
  m.h = h;
  m.dt = dt;
  m.validate();
  return m;
}

DtwaResult dtwa_run(const DiscreteSpinEnsemble& ensemble, const DtwaModel& model,
                    const std::vector<double>& times, const DtwaOptions& options) {
  model.validate();
  check_times(times);
  if (ensemble.n_spins != model.n_spins()) throw DomainError("ensemble and model sizes differ");
  if (model.kicked())
    for (double t : times) period_index(t, model.tau);
  const int n = ensemble.n_spins;
  const double nd = n;
  const std::size_t nt = times.size();
  if (options.commutator && options.estimator == CommutatorEstimator::WeylSymmetrized &&
      (options.mode == SensitivityMode::Directional || options.mode == SensitivityMode::FiniteDifference))
    throw DomainError("the Weyl-symmetrised estimator needs per-site gradients");
  const bool species = options.species_fast_path && model.all_to_all &&
                       options.mode != SensitivityMode::FullJacobian;
  const MeanField site_field = per_site_field(model);
  const bool want_c = options.commutator;

  // acc: nt * kWidth, then kept count, then flagged count
  const std::size_t width = nt * kWidth + 2;
  const auto total = block_reduce(ensemble.n_samples, width, options.threads, [&](std::size_t s, std::vector<double>& acc) {
    const auto x0_site = ensemble.sample(s);
    Spins x;
    Eigen::VectorXd w;
    MeanField local;
    const MeanField* mf = &site_field;
    if (species) {
      double na = 0.0;
      for (int i = 0; i < n; ++i) na += x0_site(0, i) > 0.0 ? 1.0 : 0.0;
      x.resize(3, 2);
      x.col(0) << 1.0, 1.0, 1.0;
      x.col(1) << -1.0, -1.0, 1.0;
      w.resize(2);
      w << na, nd - na;
      local = species_field(model, na, nd - na);
      mf = &local;
    } else {
      x = x0_site;
      w = Eigen::VectorXd::Ones(n);
    }
    const Propagator prop{*mf, model.tau, model.dt};
    const Spins x_init = x;
    std::vector<double> buf(nt * kWidth, 0.0);

    const Eigen::Index groups = x.cols();
    Eigen::MatrixXd cols;
    Spins xp, xm;
    if (want_c) {
      switch (options.mode) {
        case SensitivityMode::Gradient:
          cols = Eigen::MatrixXd::Zero(3 * groups, 2 * groups);
          for (Eigen::Index g = 0; g < groups; ++g) {
            cols(3 * g + 0, 2 * g + 0) = 1.0;
            cols(3 * g + 1, 2 * g + 1) = 1.0;
          }
          break;
        case SensitivityMode::Directional: {
          const Spins v = rotation_seed(x);
          cols = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
          break;
        }
        case SensitivityMode::FullJacobian:
          cols = Eigen::MatrixXd::Identity(3 * groups, 3 * groups);
          break;
        case SensitivityMode::FiniteDifference: {
          const Spins v = rotation_seed(x);
          xp = x + options.fd_step * v;
          xm = x - options.fd_step * v;
          break;
        }
      }
    }
    const bool carry_cols = want_c && options.mode != SensitivityMode::FiniteDifference;
    // Per-group gradient a_g = d(sum_j w_j s^z_j)/d s_g(0) / w_g from column (g, comp).
    auto gradient = [&](Eigen::Index g, int comp) {
      Eigen::Index col = 0;
      if (options.mode == SensitivityMode::Gradient) col = 2 * g + comp;
      else col = 3 * g + comp;
      Eigen::Map<const Spins> v(cols.col(col).data(), 3, groups);
      return v.row(2).dot(w.transpose()) / w[g];
    };
    double t = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      prop.advance(x, carry_cols ? &cols : nullptr, t, times[k]);
      double d2 = 0.0;
      if (want_c) {
        switch (options.mode) {
          case SensitivityMode::Gradient:
          case SensitivityMode::FullJacobian: {
            double d = 0.0, same_site = 0.0;
            for (Eigen::Index g = 0; g < groups; ++g) {
              if (w[g] == 0.0) continue;
              const double ax = gradient(g, 0), ay = gradient(g, 1);
              d += w[g] * (x_init(0, g) * ay - x_init(1, g) * ax);
              same_site += w[g] * x_init(0, g) * x_init(1, g) * ax * ay;
            }
            d2 = d * d;
            if (options.estimator == CommutatorEstimator::WeylSymmetrized) d2 += 2.0 * same_site;
            break;
          }
          case SensitivityMode::Directional: {
            Eigen::Map<const Spins> v(cols.data(), 3, groups);
            const double d = v.row(2).dot(w.transpose());
            d2 = d * d;
            break;
          }
          case SensitivityMode::FiniteDifference: {
            prop.advance(xp, nullptr, t, times[k]);
            prop.advance(xm, nullptr, t, times[k]);
            const double d = (xp.row(2).dot(w.transpose()) - xm.row(2).dot(w.transpose())) /
                             (2.0 * options.fd_step);
            d2 = d * d;
            break;
          }
        }
      }
      t = times[k];
      double* out = buf.data() + k * kWidth;
      observe(x, w, nd, out);
      out[kD2] = d2;
      for (std::size_t j = 0; j < kWidth; ++j) {
        if (!std::isfinite(out[j]) || std::abs(out[j]) > kTangentLimit) {
          acc[width - 1] += 1.0;
          return;
        }
      }
    }
    for (std::size_t j = 0; j < buf.size(); ++j) acc[j] += buf[j];
    acc[width - 2] += 1.0;
  });

  const double kept = total[width - 2];
  if (!(kept > 0.0)) throw NumericalError("every DTWA sample overflowed");
  DtwaResult res;
  res.flagged = static_cast<std::size_t>(total[width - 1]);
  res.mz.label = "mz";
  res.fq.label = "fq";
  res.c.label = "c";
  res.c.set_meta("estimator", options.estimator == CommutatorEstimator::WeylSymmetrized ? "weyl" : "product");
  for (TimeSeriesRecord* r : {&res.mz, &res.fq, &res.c}) {
    r->set_meta("N", nd);
    r->set_meta("n_samples", static_cast<double>(ensemble.n_samples));
    r->set_meta("seed", std::to_string(ensemble.seed));
    r->set_meta("flagged_samples", static_cast<double>(res.flagged));
  }
  for (std::size_t k = 0; k < nt; ++k) {
    double mean[kWidth];
    for (std::size_t j = 0; j < kWidth; ++j) mean[j] = total[k * kWidth + j] / kept;
    if (options.magnetization) res.mz.push(times[k], mean[kMz]);
    if (options.qfi) res.fq.push(times[k], qfi_density_from_means(mean, nd));
    if (options.commutator) res.c.push(times[k], 4.0 / (nd * nd * nd * nd) * mean[kD2]);
  }
  return res;
}

std::vector<DiscreteSpinEnsemble> dtwa_evolve(const DiscreteSpinEnsemble& ensemble,
                                              const DtwaModel& model,
                                              const std::vector<double>& times,
                                              std::size_t threads) {
  model.validate();
  check_times(times);
  if (ensemble.n_spins != model.n_spins()) throw DomainError("ensemble and model sizes differ");
  std::vector<DiscreteSpinEnsemble> snaps(times.size(), ensemble);
  const MeanField mf = per_site_field(model);
  const Propagator prop{mf, model.tau, model.dt};
  parallel_for(ensemble.n_samples, resolve_thread_count(threads), [&](std::size_t s) {
    Spins x = ensemble.sample(s);
    double t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      prop.advance(x, nullptr, t, times[k]);
      t = times[k];
      snaps[k].sample(s) = x;
    }
  });
  return snaps;
}

double dtwa_magnetization(const DiscreteSpinEnsemble& snapshot) {
  double sum = 0.0;
  for (std::size_t s = 0; s < snapshot.n_samples; ++s) sum += snapshot.sample(s).row(2).sum();
  return sum / (static_cast<double>(snapshot.n_samples) * snapshot.n_spins);
}

double dtwa_qfi_density(const DiscreteSpinEnsemble& snapshot) {
  const double nd = snapshot.n_spins;
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(snapshot.n_spins);
  double mean[kWidth] = {};
  for (std::size_t s = 0; s < snapshot.n_samples; ++s) {
    double out[kWidth];
    observe(Spins(snapshot.sample(s)), w, nd, out);
    for (std::size_t j = 0; j < kWidth; ++j) mean[j] += out[j];
  }
  for (double& m : mean) m /= static_cast<double>(snapshot.n_samples);
  return qfi_density_from_means(mean, nd);
}

TimeSeriesRecord dtwa_qfi(const std::vector<DiscreteSpinEnsemble>& snapshots,
                          const std::vector<double>& times) {
  if (snapshots.size() != times.size()) throw DomainError("one snapshot per time required");
  TimeSeriesRecord r;
  r.label = "fq";
  for (std::size_t k = 0; k < times.size(); ++k) r.push(times[k], dtwa_qfi_density(snapshots[k]));
  return r;
}

TimeSeriesRecord dtwa_square_commutator(const DiscreteSpinEnsemble& ensemble,
                                        const DtwaModel& model, const std::vector<double>& times,
                                        SensitivityMode mode, CommutatorEstimator estimator,
                                        std::size_t threads) {
  DtwaOptions o;
  o.magnetization = false;
  o.qfi = false;
  o.mode = mode;
  o.estimator = estimator;
  o.threads = threads;
  return dtwa_run(ensemble, model, times, o).c;
}

}  // namespace scramble
