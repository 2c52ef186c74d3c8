#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scramble/classical.hpp"
#include "scramble/series.hpp"

namespace scramble {

/// Symmetric second-order string commutators
/// c_ab = -<{[m_a(t), m_z], [m_b(t), m_z]}>/2 together with the classical
/// magnetisation they are slaved to.
struct CommutatorPairState {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();  ///< rows/cols x, y, z
  BlochVector m = BlochVector::UnitZ();

  double c_zz() const { return c(2, 2); }
};

/// Which right-hand side to integrate.
///  Derived:   dC/dt = M C + C M^T with M the tangent matrix of the mean-field
///             flow (the consistent linearisation).
///  AsPrinted: the six equations in their commonly quoted form, which differ
///             from Derived in the c_zy, c_yy and c_xx equations.
enum class ClosureForm { Derived, AsPrinted };

/// c_ab(0) from exact equal-time commutators on the spin coherent state
/// along m0: (4/N^2) eps_{azc} eps_{bzd} (n_c n_d + (delta_cd - n_c n_d)/N).
CommutatorPairState cumulant_initial_conditions(int n_spins, const BlochVector& m0);

/// Time derivative of the closed system.
CommutatorPairState cumulant_rhs(const CommutatorPairState& s, double J, double h, ClosureForm form);

/// Integrates the closure with RK4 and returns c_zz on `times`.
TimeSeriesRecord cumulant_closure_c(int n_spins, double J, double h, const BlochVector& m0,
                                    const std::vector<double>& times, double dt,
                                    ClosureForm form = ClosureForm::Derived);

/// Convenience overload sampling every `sample_dt` on [0, t_max].
TimeSeriesRecord cumulant_closure_c(int n_spins, double J, double h, const BlochVector& m0,
                                    double t_max, double dt, double sample_dt,
                                    ClosureForm form = ClosureForm::Derived);

/// Rotating-frame angles and Gaussian zero-mode moments. Angles refer to the
/// frame in which the interaction acts along x and the field along z; see
/// lab_to_frame_angles.
struct RotatingFrameState {
  double theta = 0.5 * 3.14159265358979323846;
  double phi = 0.0;
  double delta_qq = 0.5;
  double delta_pp = 0.5;
  double delta_qp = 0.0;

  double uncertainty() const { return delta_qq * delta_pp - delta_qp * delta_qp; }
};

/// Angles of a lab-frame magnetisation in the rotating-frame convention
/// (x', y', z') = (m_z, -m_y, m_x). The polarised state m = z maps to
/// theta = pi/2, phi = 0, away from the coordinate pole.
std::pair<double, double> lab_to_frame_angles(const BlochVector& m);
BlochVector frame_angles_to_lab(double theta, double phi);

RotatingFrameState holstein_primakoff_rhs(const RotatingFrameState& s, double J, double h);

/// (8/N^3) [sin^2 phi D_pp + cos^2 theta cos^2 phi D_qq - 2 cos theta sin phi cos phi D_qp].
double holstein_primakoff_assemble(const RotatingFrameState& s, int n_spins);

/// Integrates angles and moments from (theta0, phi0) with the vacuum moments
/// (1/2, 1/2, 0) and returns c(t) on `times`.
TimeSeriesRecord holstein_primakoff_c(int n_spins, double J, double h, double theta0, double phi0,
                                      const std::vector<double>& times, double dt);

TimeSeriesRecord holstein_primakoff_c(int n_spins, double J, double h, double theta0, double phi0,
                                      double t_max, double dt, double sample_dt);

/// Full rotating-frame trajectory on `times` (for diagnostics).
std::vector<RotatingFrameState> holstein_primakoff_trajectory(double J, double h, double theta0,
                                                              double phi0,
                                                              const std::vector<double>& times,
                                                              double dt);

/// How the relative deviation at time t is measured.
///  Cumulative: sqrt(sum_{s<=t} (method - ref)^2 / sum_{s<=t} ref^2) on the
///              reference grid. Insensitive to the isolated zeros a regular
///              classical orbit puts into c(t).
///  Envelope:   |method - ref|(t) / max_{s<=t} |ref(s)|.
///  Pointwise:  |method - ref|(t) / |ref(t)|.
enum class DeviationMeasure { Cumulative, Envelope, Pointwise };

/// First time t > 0 at which the relative deviation exceeds `threshold`. The
/// method series is interpolated onto the reference grid over their common
/// range; returns the end of that range when no deviation occurs.
/// Throws DomainError when the grids do not overlap.
double ehrenfest_validity_window(const TimeSeriesRecord& method, const TimeSeriesRecord& reference,
                                 double threshold = 0.1,
                                 DeviationMeasure measure = DeviationMeasure::Cumulative);

}  // namespace scramble
