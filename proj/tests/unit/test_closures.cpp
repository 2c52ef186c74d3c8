#include <doctest.h>

#include "rel.hpp"

#include <cmath>
#include <numbers>

#include "scramble/closures.hpp"
#include "scramble/errors.hpp"
#include "scramble/exact_dynamics.hpp"
#include "scramble/ode.hpp"

using namespace scramble;

namespace {

// -<{[m_a, m_z], [m_b, m_z]}>/2 on a coherent state, from explicit Dicke matrices.
Eigen::Matrix3d exact_equal_time_c(int n, double theta, double phi) {
  const SpinOperators s = build_spin_operators(n);
  const DickeState psi = DickeState::coherent(n, theta, phi);
  const double scale = 2.0 / n;
  const Eigen::MatrixXcd m[3] = {scale * s.sx.matrix, scale * s.sy.matrix, scale * s.sz.matrix};
  Eigen::MatrixXcd comm[3];
  for (int a = 0; a < 3; ++a) comm[a] = m[a] * m[2] - m[2] * m[a];
  Eigen::Matrix3d c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Eigen::MatrixXcd ac = comm[a] * comm[b] + comm[b] * comm[a];
      c(a, b) = -0.5 * psi.amplitudes.dot(ac * psi.amplitudes).real();
    }
  return c;
}

}  // namespace

TEST_SUITE("closures") {

TEST_CASE("initial conditions from exact equal-time commutators") {
  const int n = 9;
  for (auto [th, ph] : {std::pair{0.0, 0.0}, {0.7, 0.3}, {2.1, -1.2}}) {
    const BlochVector m0(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    const CommutatorPairState s = cumulant_initial_conditions(n, m0);
    CHECK((s.c - exact_equal_time_c(n, th, ph)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(s.c_zz() == 0.0);
  }
  const CommutatorPairState up = cumulant_initial_conditions(50, BlochVector::UnitZ());
  CHECK(up.c(1, 1) == rel(4.0 / (50.0 * 50 * 50)));
  CHECK(up.c(0, 0) == rel(4.0 / (50.0 * 50 * 50)));
  CHECK_THROWS_AS(cumulant_initial_conditions(10, BlochVector(0.5, 0, 0)), DomainError);
}

TEST_CASE("derived closure is the propagated tangent covariance") {
  // C(t) = T(t) C(0) T(t)^T with T the tangent map of the mean-field flow.
  const int n = 40;
  const double J = 1.0, h = 0.8;
  const BlochVector m0 = BlochVector(0.3, -0.2, 0.5).normalized();
  const std::vector<double> times = {0.0, 0.7, 3.0, 9.0};
  const auto c = cumulant_closure_c(n, J, h, m0, times, 1e-3);
  const auto tr = integrate_flow(m0, J, h, times, 1e-3, true);
  const Eigen::Matrix3d c0 = cumulant_initial_conditions(n, m0).c;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const Eigen::Matrix3d ct = tr.tangent[i] * c0 * tr.tangent[i].transpose();
    CHECK(c.values[i] == rel(ct(2, 2)).epsilon(1e-8));
  }
  CHECK(c.values[0] == 0.0);
}

TEST_CASE("closure starts with the exact early-time law") {
  const int n = 200;
  const double h = 2.0, t = 1e-3;
  const auto c = cumulant_closure_c(n, 1.0, h, BlochVector::UnitZ(), {t}, 1e-5);
  CHECK(c.values[0] == rel(16.0 * h * h * t * t / (double(n) * n * n)).epsilon(1e-3));
}

TEST_CASE("as-printed right-hand side differs only in three equations") {
  CommutatorPairState s;
  s.m = BlochVector(0.3, 0.4, 0.5).normalized();
  s.c << 1.0, 0.2, 0.3,
         0.2, 2.0, 0.4,
         0.3, 0.4, 3.0;
  const double J = 1.3, h = 0.7;
  const Eigen::Matrix3d d = cumulant_rhs(s, J, h, ClosureForm::Derived).c;
  const Eigen::Matrix3d p = cumulant_rhs(s, J, h, ClosureForm::AsPrinted).c;
  CHECK(d(2, 2) == rel(p(2, 2)));
  CHECK(d(0, 1) == rel(p(0, 1)));
  CHECK(d(0, 2) == rel(p(0, 2)));
  CHECK(std::abs(d(1, 2) - p(1, 2)) > 1e-3);
  CHECK(std::abs(d(1, 1) - p(1, 1)) > 1e-3);
  CHECK(std::abs(d(0, 0) - p(0, 0)) > 1e-3);
  CHECK((d - d.transpose()).norm() < 1e-14);
}

TEST_CASE("frame angles") {
  auto [th, ph] = lab_to_frame_angles(BlochVector::UnitZ());
  CHECK(th == rel(std::numbers::pi / 2));
  CHECK(ph == 0.0);
  const BlochVector m = BlochVector(0.2, -0.6, 0.3).normalized();
  auto [t2, p2] = lab_to_frame_angles(m);
  CHECK((frame_angles_to_lab(t2, p2) - m).norm() < 1e-14);
}

TEST_CASE("rotating-frame angles follow the mean-field flow") {
  const double J = 1.0, h = 0.6;
  const BlochVector m0 = BlochVector(0.1, 0.4, 0.8).normalized();
  auto [th, ph] = lab_to_frame_angles(m0);
  const std::vector<double> times = {0.0, 1.0, 4.0, 15.0};
  const auto hp = holstein_primakoff_trajectory(J, h, th, ph, times, 1e-3);
  const auto tr = integrate_flow(m0, J, h, times, 1e-3);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK((frame_angles_to_lab(hp[i].theta, hp[i].phi) - tr.m[i]).norm() < 1e-9);
}

TEST_CASE("Gaussian fluctuations keep minimal uncertainty") {
  const auto traj = holstein_primakoff_trajectory(1.0, 2.0, std::numbers::pi / 2, 0.0,
                                                  uniform_times(40.0, 0.5), 1e-3);
  for (const auto& s : traj) {
    const double excess = s.uncertainty() - 0.25;
    INFO(excess);
    CHECK(excess >= -1e-9);
  }
  CHECK(traj.front().delta_qq == 0.5);
}

TEST_CASE("factorised moment propagation solves the moment equations") {
  using V5 = Eigen::Matrix<double, 5, 1>;
  const double J = 1.0, h = 0.4;
  const auto rhs = [&](double, const V5& y) {
    const RotatingFrameState d = holstein_primakoff_rhs({y[0], y[1], y[2], y[3], y[4]}, J, h);
    V5 out;
    out << d.theta, d.phi, d.delta_qq, d.delta_pp, d.delta_qp;
    return out;
  };
  const std::vector<double> times = {0.0, 2.0, 7.5};
  const auto traj = holstein_primakoff_trajectory(J, h, 1.2, 0.4, times, 1e-3);
  V5 y;
  y << 1.2, 0.4, 0.5, 0.5, 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    y = ode::rk4_advance(y, t, times[i], 1e-4, rhs);
    t = times[i];
    CHECK(traj[i].theta == rel(y[0]).epsilon(1e-9));
    CHECK(traj[i].phi == rel(y[1]).epsilon(1e-9));
    CHECK(traj[i].delta_qq == rel(y[2]).epsilon(1e-8));
    CHECK(traj[i].delta_pp == rel(y[3]).epsilon(1e-8));
    CHECK(std::abs(traj[i].delta_qp - y[4]) < 1e-8 * (1.0 + std::abs(y[4])));
  }
}

TEST_CASE("the two closure schemes coincide") {
  const int n = 50;
  const std::vector<double> times = uniform_times(10.0, 0.25);
  for (double h : {0.3, 2.0}) {
    const auto cc = cumulant_closure_c(n, 1.0, h, BlochVector::UnitZ(), times, 1e-3);
    const auto hp = holstein_primakoff_c(n, 1.0, h, std::numbers::pi / 2, 0.0, times, 1e-3);
    CHECK(hp.values[0] < 1e-30);
    for (std::size_t i = 1; i < times.size(); ++i)
      CHECK(hp.values[i] == rel(cc.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("closure agrees with exact dynamics at early times") {
  const int n = 200;
  const double h = 2.0;
  const std::vector<double> times = uniform_times(2.0, 0.1);
  const auto dec = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, h));
  const auto ed = square_commutator(DickeState::polarized_up(n), dec, times);
  const auto cc = cumulant_closure_c(n, 1.0, h, BlochVector::UnitZ(), times, 1e-3);
  // Pointwise to 5% before the first classical zero of c, then to 10% of the envelope.
  double envelope = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    envelope = std::max(envelope, ed.values[i]);
    if (times[i] <= 0.6) CHECK(cc.values[i] == rel(ed.values[i]).epsilon(0.05));
    CHECK(std::abs(cc.values[i] - ed.values[i]) <= 0.1 * envelope);
  }
}

TEST_CASE("RK4 step refinement") {
  const auto a = cumulant_closure_c(50, 1.0, 2.0, BlochVector::UnitZ(), {20.0}, 1e-3);
  const auto b = cumulant_closure_c(50, 1.0, 2.0, BlochVector::UnitZ(), {20.0}, 5e-4);
  CHECK(std::abs(a.values[0] - b.values[0]) < 1e-8 * std::abs(b.values[0]));
  CHECK_THROWS_AS(cumulant_closure_c(50, 1.0, 2.0, BlochVector::UnitZ(), {1.0}, 0.0), DomainError);
}

TEST_CASE("validity window") {
  TimeSeriesRecord a;
  for (double t : uniform_times(5.0, 0.5)) a.push(t, t * t);
  for (auto m : {DeviationMeasure::Cumulative, DeviationMeasure::Envelope, DeviationMeasure::Pointwise})
    CHECK(ehrenfest_validity_window(a, a, 0.1, m) == 5.0);
  TimeSeriesRecord b = a;
  b.values[6] *= 1.2;  // t = 3
  CHECK(ehrenfest_validity_window(b, a, 0.1, DeviationMeasure::Pointwise) == 3.0);
  CHECK(ehrenfest_validity_window(b, a, 0.25, DeviationMeasure::Pointwise) == 5.0);
  // sum of squares up to t = 3: 0 + 1/16 + 1 + 81/16 + 16 + 625/16 + 81 = 142.1875
  // squared error 3.24; relative L2 0.151
  CHECK(ehrenfest_validity_window(b, a, 0.15) == 3.0);
  CHECK(ehrenfest_validity_window(b, a, 0.16) == 5.0);
  // A dip of the reference to zero trips the pointwise measure only.
  TimeSeriesRecord dip = a, near = a;
  dip.values[4] = 0.0;
  near.values[4] = 0.2;
  CHECK(ehrenfest_validity_window(near, dip, 0.1, DeviationMeasure::Pointwise) == 2.0);
  CHECK(ehrenfest_validity_window(near, dip, 0.1, DeviationMeasure::Envelope) == 5.0);
  CHECK(ehrenfest_validity_window(near, dip) == 5.0);
  TimeSeriesRecord far;
  far.push(10.0, 1.0);
  far.push(11.0, 1.0);
  CHECK_THROWS_AS(ehrenfest_validity_window(far, a), DomainError);
}

}  // TEST_SUITE
