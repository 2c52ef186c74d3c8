#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "scramble/series.hpp"

namespace scramble {

/// Unit magnetisation (m_x, m_y, m_z). Canonical pair: Q = m_z and
/// P = atan2(m_y, m_x) / 2, so that m_x = sqrt(1 - Q^2) cos 2P.
using BlochVector = Eigen::Vector3d;

BlochVector bloch_from_qp(double q, double p);
double canonical_q(const BlochVector& m);
/// P in (-pi/2, pi/2].
double canonical_p(const BlochVector& m);

/// H0 = -(J/2) m_z^2 - h m_x.
double classical_energy(const BlochVector& m, double J, double h);

/// Right-hand side of the mean-field equations of motion.
BlochVector flow_rhs(const BlochVector& m, double J, double h);

/// Tangent matrix d(flow_rhs)/dm.
Eigen::Matrix3d flow_jacobian(const BlochVector& m, double J, double h);

struct BlochTrajectory {
  std::vector<double> times;
  std::vector<BlochVector> m;
  /// dm(t)/dm(0); empty unless requested.
  std::vector<Eigen::Matrix3d> tangent;

  TimeSeriesRecord component(int axis, const std::string& label) const;
};

/// RK4 integration sampled at `times` (increasing, starting at or after 0)
/// with steps no longer than dt. |m| is renormalised after any step whose
/// drift exceeds 1e-12.
BlochTrajectory integrate_flow(const BlochVector& m0, double J, double h,
                               const std::vector<double>& times, double dt,
                               bool with_tangent = false);

/// Samples every `sample_dt` on [0, t_max].
BlochTrajectory integrate_flow(const BlochVector& m0, double J, double h, double t_max,
                               double dt, double sample_dt, bool with_tangent = false);

struct KickParams {
  double J = 1.0;
  double h = 2.0;
  double K = 0.0;
  double tau = 1.0;
  double dt = 1e-3;
};

/// Rotation about z by angle 2 K m_z (counter-clockwise, P -> P + K Q).
BlochVector kick(const BlochVector& m, double K);
Eigen::Matrix3d kick_jacobian(const BlochVector& m, double K);

/// One period: free flow for tau, then the kick.
BlochVector kicked_map(const BlochVector& m, const KickParams& p);
/// One period with the 3x3 tangent map accumulated into `tangent`.
BlochVector kicked_map(const BlochVector& m, const KickParams& p, Eigen::Matrix3d& tangent);

/// Stroboscopic (Q, P) points for each seed, seed included.
std::vector<std::vector<std::pair<double, double>>> poincare_section(
    const std::vector<BlochVector>& seeds, int n_periods, const KickParams& p);

/// Fraction of cells of a bins x bins grid over Q in [-1, 1],
/// P in (-pi/2, pi/2] visited by the points.
double occupancy_fraction(const std::vector<std::pair<double, double>>& points, int bins = 100);

struct LyapunovResult {
  double exponent = 0.0;
  std::vector<double> trace;  ///< running estimate after each renormalisation
};

/// Benettin estimate of the largest exponent. For K != 0 the tangent vector
/// is renormalised once per period; for K = 0 the flow is integrated
/// continuously and renormalised every `renorm_time`. Throws
/// NonConvergenceError when the estimate over the last decade of
/// renormalisations varies by more than max(1% of |lambda|, abs_tol).
LyapunovResult lyapunov_benettin(const BlochVector& m0, const KickParams& p, int n_periods,
                                 double renorm_time = 1.0, double abs_tol = 5e-3);

/// Divergence of two nearby trajectories separated by d0 along the
/// sphere, rescaled back to d0 after each period.
double lyapunov_two_trajectory(const BlochVector& m0, const KickParams& p, int n_periods,
                               double d0 = 1e-8);

/// 2 sqrt(h (1 - h)) in units J = 1.
double separatrix_exponent(double h);

struct DptResult {
  double q_bar = 0.0;
  double h_c = 0.0;
  BlochVector m0;
};

/// Classical ground state of H0 at field h0.
BlochVector classical_ground_state(double J, double h0);

/// Time average of Q over [0, t_avg] after a quench h0 -> hf, starting from
/// the classical ground state at h0. h_c = (h0 + J) / 2.
DptResult dpt_order_parameter(double h0, double hf, double J, double t_avg, double dt = 1e-3);

/// Canonical 2x2 tangent map d(Q, P)(t) / d(Q, P)(0) obtained by pushing the
/// Cartesian tangent through the (Q, P) chart. Singular at the poles.
Eigen::Matrix2d canonical_tangent(const BlochVector& m0, const BlochVector& mt,
                                  const Eigen::Matrix3d& tangent);

/// dm(0)/dP(0) = 2 (-m_y, m_x, 0).
BlochVector dm_dp(const BlochVector& m);

/// dQ(t)/dP(0) on the grid `times` (its square is the squared canonical
/// bracket of Q(t) with Q(0)).
TimeSeriesRecord tangent_poisson_bracket(const BlochVector& m0, double J, double h,
                                         const std::vector<double>& times, double dt = 1e-3);

}  // namespace scramble
