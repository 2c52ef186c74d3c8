#include "scramble/closures.hpp"

#include <algorithm>
#include <cmath>

#include "scramble/errors.hpp"
#include "scramble/ode.hpp"

namespace scramble {

namespace {

using Packed = Eigen::Matrix<double, 12, 1>;

Packed pack(const CommutatorPairState& s) {
  Packed y;
  y.head<3>() = s.m;
  y.tail<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(s.c.data());
  return y;
}

CommutatorPairState unpack(const Packed& y) {
  CommutatorPairState s;
  s.m = y.head<3>();
  s.c = Eigen::Map<const Eigen::Matrix3d>(y.tail<9>().data());
  return s;
}

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("sample times must be non-negative");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample times must be non-decreasing");
  }
}

void check_params(int n_spins, double dt) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
}

}  // namespace

CommutatorPairState cumulant_initial_conditions(int n_spins, const BlochVector& m0) {
  if (n_spins < 1) throw DomainError("N must be positive");
  if (std::abs(m0.norm() - 1.0) > 1e-9) throw DomainError("magnetisation must lie on the unit sphere");
  // [m_a, m_z] = (2i/N) eps_{azc} m_c, so the anticommutator average reduces to
  // the coherent-state second moment of m along m0.
  const double inv_n = 1.0 / n_spins;
  Eigen::Matrix3d second = m0 * m0.transpose();
  second += inv_n * (Eigen::Matrix3d::Identity() - m0 * m0.transpose());
  // e(a, c) = eps_{a z c}: eps_{xzy} = -1, eps_{yzx} = +1.
  Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
  e(0, 1) = -1.0;
  e(1, 0) = 1.0;
  CommutatorPairState s;
  s.m = m0;
  s.c = (4.0 * inv_n * inv_n) * e * second * e.transpose();
  return s;
}

CommutatorPairState cumulant_rhs(const CommutatorPairState& s, double J, double h,
                                 ClosureForm form) {
  CommutatorPairState d;
  d.m = flow_rhs(s.m, J, h);
  if (form == ClosureForm::Derived) {
    const Eigen::Matrix3d a = flow_jacobian(s.m, J, h);
    d.c = a * s.c + s.c * a.transpose();
    return d;
  }
  const Eigen::Matrix3d& c = s.c;
  const double mx = s.m.x(), my = s.m.y(), mz = s.m.z();
  const double czz = -4.0 * h * c(2, 1);
  const double czy = -2.0 * h * c(1, 1) + 2.0 * h * c(2, 2) - 2.0 * J * (c(2, 2) * mz + c(2, 0) * mx);
  const double cyy = 4.0 * h * c(1, 2) - 4.0 * J * (c(0, 1) * mz + c(0, 1) * mz);
  const double cxy = 2.0 * h * c(0, 2) - 2.0 * J * (c(0, 0) * mz + c(0, 2) * mx) +
                     2.0 * J * (c(1, 1) * mz + c(1, 2) * my);
  const double cxz = -2.0 * h * c(0, 1) + 2.0 * J * (c(2, 2) * my + c(2, 1) * mz);
  const double cxx = 2.0 * J * (c(0, 2) * my + c(0, 1) * mz);
  d.c << cxx, cxy, cxz,
         cxy, cyy, czy,
         cxz, czy, czz;
  return d;
}

TimeSeriesRecord cumulant_closure_c(int n_spins, double J, double h, const BlochVector& m0,
                                    const std::vector<double>& times, double dt,
                                    ClosureForm form) {
  check_params(n_spins, dt);
  check_times(times);
  const auto rhs = [&](double, const Packed& y) { return pack(cumulant_rhs(unpack(y), J, h, form)); };
  Packed y = pack(cumulant_initial_conditions(n_spins, m0));
  TimeSeriesRecord r;
  r.label = "c";
  r.set_meta("N", static_cast<double>(n_spins));
  r.set_meta("closure", form == ClosureForm::Derived ? "derived" : "as_printed");
  double t = 0.0;
  for (double target : times) {
    y = ode::rk4_advance(y, t, target, dt, rhs);
    t = std::max(t, target);
    const double v = y[3 + 8];
    if (!std::isfinite(v)) throw NumericalError("closure integration produced a non-finite value");
    r.push(target, v);
  }
  return r;
}

TimeSeriesRecord cumulant_closure_c(int n_spins, double J, double h, const BlochVector& m0,
                                    double t_max, double dt, double sample_dt, ClosureForm form) {
  return cumulant_closure_c(n_spins, J, h, m0, uniform_times(t_max, sample_dt), dt, form);
}

std::pair<double, double> lab_to_frame_angles(const BlochVector& m) {
  const double x = m.z(), y = -m.y(), z = m.x();
  return {std::acos(std::clamp(z / m.norm(), -1.0, 1.0)), std::atan2(y, x)};
}

BlochVector frame_angles_to_lab(double theta, double phi) {
  const double x = std::sin(theta) * std::cos(phi);
  const double y = std::sin(theta) * std::sin(phi);
  const double z = std::cos(theta);
  return {z, -y, x};
}

RotatingFrameState holstein_primakoff_rhs(const RotatingFrameState& s, double J, double h) {
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  const double sp = std::sin(s.phi), cp = std::cos(s.phi);
  const double c2 = cp * cp, s2 = sp * sp;
  RotatingFrameState d;
  d.theta = 2.0 * J * st * cp * sp;
  d.phi = -2.0 * h + 2.0 * J * ct * c2;
  d.delta_qq = 4.0 * J * ct * sp * cp * s.delta_qq + 4.0 * J * (c2 - s2) * s.delta_qp;
  d.delta_pp = -4.0 * J * ct * sp * cp * s.delta_pp - 4.0 * J * c2 * st * st * s.delta_qp;
  d.delta_qp = -2.0 * J * c2 * st * st * s.delta_qq + 2.0 * J * (c2 - s2) * s.delta_pp;
  return d;
}

double holstein_primakoff_assemble(const RotatingFrameState& s, int n_spins) {
  const double ct = std::cos(s.theta);
  const double sp = std::sin(s.phi), cp = std::cos(s.phi);
  const double n = n_spins;
  return 8.0 / (n * n * n) *
         (sp * sp * s.delta_pp + ct * ct * cp * cp * s.delta_qq - 2.0 * ct * sp * cp * s.delta_qp);
}

std::vector<RotatingFrameState> holstein_primakoff_trajectory(double J, double h, double theta0,
                                                              double phi0,
                                                              const std::vector<double>& times,
                                                              double dt) {
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
  check_times(times);
  // The moment equations are a congruence D -> S D S^T with dS/dt = A S and
  // tr A = 0. Integrating S and restoring det S = 1 after each step keeps
  // D_qq D_pp - D_qp^2 exactly at its vacuum value.
  using Frame = Eigen::Matrix<double, 6, 1>;  // theta, phi, S (column-major)
  const auto rhs = [&](double, const Frame& y) {
    const double st = std::sin(y[0]), ct = std::cos(y[0]);
    const double sp = std::sin(y[1]), cp = std::cos(y[1]);
    const double c2 = cp * cp, s2 = sp * sp;
    Eigen::Matrix2d a;
    a << 2.0 * J * ct * sp * cp, 2.0 * J * (c2 - s2),
        -2.0 * J * c2 * st * st, -2.0 * J * ct * sp * cp;
    const Eigen::Matrix2d sm = Eigen::Map<const Eigen::Matrix2d>(y.data() + 2);
    const Eigen::Matrix2d ds = a * sm;
    Frame d;
    d[0] = 2.0 * J * st * cp * sp;
    d[1] = -2.0 * h + 2.0 * J * ct * c2;
    d.tail<4>() = Eigen::Map<const Eigen::Vector4d>(ds.data());
    return d;
  };
  const auto unimodular = [](Frame& y) {
    const double det = y[2] * y[5] - y[4] * y[3];
    if (det > 0.0) y.tail<4>() /= std::sqrt(det);
  };
  Frame y;
  y << theta0, phi0, 1.0, 0.0, 0.0, 1.0;
  const RotatingFrameState vacuum;
  Eigen::Matrix2d d0;
  d0 << vacuum.delta_qq, vacuum.delta_qp, vacuum.delta_qp, vacuum.delta_pp;
  std::vector<RotatingFrameState> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double target : times) {
    y = ode::rk4_advance(y, t, target, dt, rhs, unimodular);
    t = std::max(t, target);
    if (!y.allFinite()) throw NumericalError("rotating-frame integration produced a non-finite value");
    const Eigen::Matrix2d sm = Eigen::Map<const Eigen::Matrix2d>(y.data() + 2);
    const Eigen::Matrix2d d = sm * d0 * sm.transpose();
    out.push_back({y[0], y[1], d(0, 0), d(1, 1), 0.5 * (d(0, 1) + d(1, 0))});
  }
  return out;
}

TimeSeriesRecord holstein_primakoff_c(int n_spins, double J, double h, double theta0, double phi0,
                                      const std::vector<double>& times, double dt) {
  check_params(n_spins, dt);
  const auto traj = holstein_primakoff_trajectory(J, h, theta0, phi0, times, dt);
  TimeSeriesRecord r;
  r.label = "c";
  r.set_meta("N", static_cast<double>(n_spins));
  for (std::size_t i = 0; i < times.size(); ++i)
    r.push(times[i], holstein_primakoff_assemble(traj[i], n_spins));
  return r;
}

TimeSeriesRecord holstein_primakoff_c(int n_spins, double J, double h, double theta0, double phi0,
                                      double t_max, double dt, double sample_dt) {
  return holstein_primakoff_c(n_spins, J, h, theta0, phi0, uniform_times(t_max, sample_dt), dt);
}

double ehrenfest_validity_window(const TimeSeriesRecord& method, const TimeSeriesRecord& reference,
                                 double threshold, DeviationMeasure measure) {
  method.validate();
  reference.validate();
  if (method.size() == 0 || reference.size() == 0) throw DomainError("empty series");
  if (!(threshold > 0.0)) throw DomainError("threshold must be positive");
  const double lo = std::max(method.times.front(), reference.times.front());
  const double hi = std::min(method.times.back(), reference.times.back());
  if (hi <= lo) throw DomainError("series do not overlap in time");
  double envelope = 0.0, err2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double t = reference.times[i];
    if (t < lo || t > hi) continue;
    const double ref = reference.values[i];
    const double diff = std::abs(method.at(t) - ref);
    envelope = std::max(envelope, std::abs(ref));
    err2 += diff * diff;
    ref2 += ref * ref;
    if (t <= 0.0) continue;
    bool exceeded = false;
    switch (measure) {
      case DeviationMeasure::Cumulative: exceeded = err2 > threshold * threshold * ref2; break;
      case DeviationMeasure::Envelope: exceeded = diff > threshold * envelope; break;
      case DeviationMeasure::Pointwise: exceeded = diff > threshold * std::abs(ref); break;
    }
    if (exceeded) return t;
  }
  return hi;
}

}  // namespace scramble
