#pragma once

#include "scramble/series.hpp"

namespace scramble {

struct FitResult {
  double slope = 0.0;      ///< exponent (power law) or rate (exponential)
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least squares of ln v against ln t over samples with t in [t_lo, t_hi]:
/// v ~ prefactor * t^slope. Needs t > 0, v > 0 and at least two points.
FitResult fit_power_law(const TimeSeriesRecord& series, double t_lo, double t_hi);

/// Least squares of ln v against t: v ~ prefactor * exp(slope * t).
FitResult fit_exponential(const TimeSeriesRecord& series, double t_lo, double t_hi);

}  // namespace scramble
