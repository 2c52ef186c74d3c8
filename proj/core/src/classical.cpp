#include "scramble/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

using Tangent3 = Eigen::Matrix3d;

void require_unit(const BlochVector& m) {
  if (std::abs(m.norm() - 1.0) > 1e-9) throw DomainError("magnetisation must lie on the unit sphere");
}

void renormalize(BlochVector& m) {
  const double n = m.norm();
  if (std::abs(n - 1.0) > 1e-12) m /= n;
}

// One RK4 step for m and a block of tangent columns W (dW/dt = M(m) W).
template <int C>
void rk4_tangent_step(BlochVector& m, Eigen::Matrix<double, 3, C>& w, double J, double h,
                      double dt) {
  using Block = Eigen::Matrix<double, 3, C>;
  const BlochVector k1 = flow_rhs(m, J, h);
  const Block l1 = flow_jacobian(m, J, h) * w;
  const BlochVector m2 = m + 0.5 * dt * k1;
  const Block w2 = w + 0.5 * dt * l1;
  const BlochVector k2 = flow_rhs(m2, J, h);
  const Block l2 = flow_jacobian(m2, J, h) * w2;
  const BlochVector m3 = m + 0.5 * dt * k2;
  const Block w3 = w + 0.5 * dt * l2;
  const BlochVector k3 = flow_rhs(m3, J, h);
  const Block l3 = flow_jacobian(m3, J, h) * w3;
  const BlochVector m4 = m + dt * k3;
  const Block w4 = w + dt * l3;
  const BlochVector k4 = flow_rhs(m4, J, h);
  const Block l4 = flow_jacobian(m4, J, h) * w4;
  m += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  w += (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

void rk4_step(BlochVector& m, double J, double h, double dt) {
  const BlochVector k1 = flow_rhs(m, J, h);
  const BlochVector k2 = flow_rhs(m + 0.5 * dt * k1, J, h);
  const BlochVector k3 = flow_rhs(m + 0.5 * dt * k2, J, h);
  const BlochVector k4 = flow_rhs(m + dt * k3, J, h);
  m += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::size_t step_count(double span, double dt) {
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
  if (span <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

// Free flow over `span`, optionally carrying tangent columns.
void advance(BlochVector& m, double J, double h, double span, double dt) {
  const std::size_t n = step_count(span, dt);
  if (n == 0) return;
  const double step = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    rk4_step(m, J, h, step);
    renormalize(m);
  }
}

template <int C>
void advance(BlochVector& m, Eigen::Matrix<double, 3, C>& w, double J, double h, double span,
             double dt) {
  const std::size_t n = step_count(span, dt);
  if (n == 0) return;
  const double step = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    rk4_tangent_step<C>(m, w, J, h, step);
    renormalize(m);
  }
}

BlochVector unit_tangent_seed(const BlochVector& m) {
  // Any unit vector orthogonal to m.
  BlochVector a = std::abs(m.x()) < 0.9 ? BlochVector::UnitX() : BlochVector::UnitY();
  BlochVector v = a - a.dot(m) * m;
  return v.normalized();
}

}  // namespace

BlochVector bloch_from_qp(double q, double p) {
  if (q < -1.0 || q > 1.0) throw DomainError("Q must lie in [-1, 1]");
  const double r = std::sqrt(1.0 - q * q);
  return {r * std::cos(2.0 * p), r * std::sin(2.0 * p), q};
}

double canonical_q(const BlochVector& m) { return m.z(); }

double canonical_p(const BlochVector& m) {
  double p = 0.5 * std::atan2(m.y(), m.x());
  if (p <= -0.5 * std::numbers::pi) p += std::numbers::pi;
  return p;
}

double classical_energy(const BlochVector& m, double J, double h) {
  return -0.5 * J * m.z() * m.z() - h * m.x();
}

BlochVector flow_rhs(const BlochVector& m, double J, double h) {
  return {2.0 * J * m.y() * m.z(), 2.0 * h * m.z() - 2.0 * J * m.x() * m.z(), -2.0 * h * m.y()};
}

Eigen::Matrix3d flow_jacobian(const BlochVector& m, double J, double h) {
  Eigen::Matrix3d a;
  a << 0.0, 2.0 * J * m.z(), 2.0 * J * m.y(),
      -2.0 * J * m.z(), 0.0, 2.0 * h - 2.0 * J * m.x(),
      0.0, -2.0 * h, 0.0;
  return a;
}

TimeSeriesRecord BlochTrajectory::component(int axis, const std::string& label) const {
  TimeSeriesRecord r;
  r.label = label;
  r.times = times;
  r.values.reserve(m.size());
  for (const auto& v : m) r.values.push_back(v[axis]);
  return r;
}

BlochTrajectory integrate_flow(const BlochVector& m0, double J, double h,
                               const std::vector<double>& times, double dt, bool with_tangent) {
  require_unit(m0);
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
  BlochTrajectory traj;
  traj.times = times;
  traj.m.reserve(times.size());
  if (with_tangent) traj.tangent.reserve(times.size());
  BlochVector m = m0;
  Tangent3 w = Tangent3::Identity();
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw DomainError("output times must be non-decreasing and >= 0");
    if (with_tangent) {
      advance<3>(m, w, J, h, target - t, dt);
    } else {
      advance(m, J, h, target - t, dt);
    }
    t = target;
    traj.m.push_back(m);
    if (with_tangent) traj.tangent.push_back(w);
  }
  return traj;
}

BlochTrajectory integrate_flow(const BlochVector& m0, double J, double h, double t_max, double dt,
                               double sample_dt, bool with_tangent) {
  return integrate_flow(m0, J, h, uniform_times(t_max, sample_dt), dt, with_tangent);
}

BlochVector kick(const BlochVector& m, double K) {
  const double th = 2.0 * K * m.z();
  const double c = std::cos(th), s = std::sin(th);
  return {c * m.x() - s * m.y(), s * m.x() + c * m.y(), m.z()};
}

Eigen::Matrix3d kick_jacobian(const BlochVector& m, double K) {
  const double th = 2.0 * K * m.z();
  const double c = std::cos(th), s = std::sin(th);
  const BlochVector out = kick(m, K);
  Eigen::Matrix3d j;
  j << c, -s, -2.0 * K * out.y(),
      s, c, 2.0 * K * out.x(),
      0.0, 0.0, 1.0;
  return j;
}

BlochVector kicked_map(const BlochVector& m, const KickParams& p) {
  BlochVector x = m;
  advance(x, p.J, p.h, p.tau, p.dt);
  return kick(x, p.K);
}

BlochVector kicked_map(const BlochVector& m, const KickParams& p, Eigen::Matrix3d& tangent) {
  BlochVector x = m;
  Tangent3 w = tangent;
  advance<3>(x, w, p.J, p.h, p.tau, p.dt);
  tangent = kick_jacobian(x, p.K) * w;
  return kick(x, p.K);
}

std::vector<std::vector<std::pair<double, double>>> poincare_section(
    const std::vector<BlochVector>& seeds, int n_periods, const KickParams& p) {
  if (n_periods < 0) throw DomainError("number of periods must be non-negative");
  std::vector<std::vector<std::pair<double, double>>> out;
  out.reserve(seeds.size());
  for (const auto& s : seeds) {
    require_unit(s);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<std::size_t>(n_periods) + 1);
    BlochVector m = s;
    pts.emplace_back(canonical_q(m), canonical_p(m));
    for (int n = 0; n < n_periods; ++n) {
      m = kicked_map(m, p);
      pts.emplace_back(canonical_q(m), canonical_p(m));
    }
    out.push_back(std::move(pts));
  }
  return out;
}

double occupancy_fraction(const std::vector<std::pair<double, double>>& points, int bins) {
  if (bins < 1) throw DomainError("grid needs at least one bin");
  std::vector<char> seen(static_cast<std::size_t>(bins) * bins, 0);
  for (const auto& [q, p] : points) {
    int iq = static_cast<int>(std::floor((q + 1.0) / 2.0 * bins));
    int ip = static_cast<int>(std::floor((p + 0.5 * std::numbers::pi) / std::numbers::pi * bins));
    iq = std::clamp(iq, 0, bins - 1);
    ip = std::clamp(ip, 0, bins - 1);
    seen[static_cast<std::size_t>(iq) * bins + ip] = 1;
  }
  std::size_t count = 0;
  for (char c : seen) count += c;
  return static_cast<double>(count) / (static_cast<double>(bins) * bins);
}

LyapunovResult lyapunov_benettin(const BlochVector& m0, const KickParams& p, int n_periods,
                                 double renorm_time, double abs_tol) {
  require_unit(m0);
  if (n_periods < 10) throw DomainError("Benettin estimate needs at least 10 periods");
  if (!(renorm_time > 0.0)) throw DomainError("renormalisation interval must be positive");
  BlochVector m = m0;
  Eigen::Matrix<double, 3, 1> w = unit_tangent_seed(m0);
  LyapunovResult res;
  double log_sum = 0.0, elapsed = 0.0;
  const bool kicked = p.K != 0.0;
  const double total = n_periods * p.tau;
  const std::size_t n_segments =
      kicked ? static_cast<std::size_t>(n_periods) : step_count(total, renorm_time);
  const double seg = kicked ? p.tau : total / static_cast<double>(n_segments);
  res.trace.reserve(n_segments);
  for (std::size_t i = 0; i < n_segments; ++i) {
    advance<1>(m, w, p.J, p.h, seg, p.dt);
    if (kicked) {
      w = kick_jacobian(m, p.K) * w;
      m = kick(m, p.K);
    }
    const double len = w.norm();
    if (!std::isfinite(len) || len == 0.0) throw NumericalError("tangent vector degenerated");
    log_sum += std::log(len);
    w /= len;
    elapsed += seg;
    res.trace.push_back(log_sum / elapsed);
  }
  res.exponent = res.trace.back();
  double spread = 0.0;
  for (std::size_t i = res.trace.size() / 10; i < res.trace.size(); ++i)
    spread = std::max(spread, std::abs(res.trace[i] - res.exponent));
  if (spread > std::max(0.01 * std::abs(res.exponent), abs_tol))
    throw NonConvergenceError("Lyapunov estimate did not settle over the last decade", res.trace);
  return res;
}

double lyapunov_two_trajectory(const BlochVector& m0, const KickParams& p, int n_periods, double d0) {
  require_unit(m0);
  if (n_periods < 1) throw DomainError("need at least one period");
  BlochVector a = m0;
  BlochVector b = (m0 + d0 * unit_tangent_seed(m0)).normalized();
  double log_sum = 0.0;
  for (int n = 0; n < n_periods; ++n) {
    a = kicked_map(a, p);
    b = kicked_map(b, p);
    const double d = (b - a).norm();
    if (!(d > 0.0)) throw NumericalError("trajectories coincided");
    log_sum += std::log(d / d0);
    b = (a + (b - a) * (d0 / d)).normalized();
  }
  return log_sum / (n_periods * p.tau);
}

double separatrix_exponent(double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("separatrix exponent requires 0 < h < 1");
  return 2.0 * std::sqrt(h * (1.0 - h));
}

BlochVector classical_ground_state(double J, double h0) {
  if (!(J > 0.0)) throw DomainError("coupling J must be positive");
  const double r = h0 / J;
  if (std::abs(r) >= 1.0) return {h0 >= 0 ? 1.0 : -1.0, 0.0, 0.0};
  return {r, 0.0, std::sqrt(1.0 - r * r)};
}

DptResult dpt_order_parameter(double h0, double hf, double J, double t_avg, double dt) {
  if (!(t_avg > 0.0)) throw DomainError("averaging time must be positive");
  DptResult res;
  res.m0 = classical_ground_state(J, h0);
  res.h_c = 0.5 * (h0 + J);
  const std::size_t n = step_count(t_avg, dt);
  const double step = t_avg / static_cast<double>(n);
  BlochVector m = res.m0;
  double acc = 0.5 * m.z();
  for (std::size_t i = 0; i < n; ++i) {
    rk4_step(m, J, hf, step);
    renormalize(m);
    acc += (i + 1 == n ? 0.5 : 1.0) * m.z();
  }
  res.q_bar = acc * step / t_avg;
  return res;
}

BlochVector dm_dp(const BlochVector& m) { return {-2.0 * m.y(), 2.0 * m.x(), 0.0}; }

Eigen::Matrix2d canonical_tangent(const BlochVector& m0, const BlochVector& mt,
                                  const Eigen::Matrix3d& tangent) {
  const double r0sq = m0.x() * m0.x() + m0.y() * m0.y();
  const double rtsq = mt.x() * mt.x() + mt.y() * mt.y();
  if (r0sq < 1e-24 || rtsq < 1e-24) throw NumericalError("canonical chart is singular at the poles");
  // dm0/dQ0 keeps P fixed: the radial part scales as sqrt(1 - Q^2).
  const double q0 = m0.z();
  const BlochVector dq(-q0 / r0sq * m0.x(), -q0 / r0sq * m0.y(), 1.0);
  const BlochVector dp = dm_dp(m0);
  const BlochVector grad_q(0.0, 0.0, 1.0);
  const BlochVector grad_p(-mt.y() / (2.0 * rtsq), mt.x() / (2.0 * rtsq), 0.0);
  Eigen::Matrix<double, 3, 2> cols;
  cols.col(0) = tangent * dq;
  cols.col(1) = tangent * dp;
  Eigen::Matrix2d out;
  out(0, 0) = grad_q.dot(cols.col(0));
  out(0, 1) = grad_q.dot(cols.col(1));
  out(1, 0) = grad_p.dot(cols.col(0));
  out(1, 1) = grad_p.dot(cols.col(1));
  return out;
}

TimeSeriesRecord tangent_poisson_bracket(const BlochVector& m0, double J, double h,
                                         const std::vector<double>& times, double dt) {
  const BlochTrajectory tr = integrate_flow(m0, J, h, times, dt, true);
  const BlochVector v = dm_dp(m0);
  TimeSeriesRecord rec;
  rec.label = "dQ/dP0";
  rec.times = times;
  rec.values.reserve(times.size());
  for (const auto& t : tr.tangent) rec.values.push_back((t * v).z());
  rec.set_meta("J", J);
  rec.set_meta("h", h);
  return rec;
}

}  // namespace scramble
