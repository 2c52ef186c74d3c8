#include "scramble/fits.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

FitResult linear_fit(const TimeSeriesRecord& s, double t_lo, double t_hi, bool log_x) {
  s.validate();
  if (!(t_lo <= t_hi)) throw DomainError("fit window is empty");
  if (s.size() == 0 || t_lo < s.times.front() - 1e-12 || t_hi > s.times.back() + 1e-12)
    throw DomainError("fit window [" + format_double(t_lo) + ", " + format_double(t_hi) +
                      "] is not inside the series '" + s.label + "'");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.times[i];
    if (t < t_lo || t > t_hi) continue;
    const double v = s.values[i];
    if (!(v > 0.0)) throw DomainError("non-positive value " + format_double(v) + " at t = " + format_double(t) +
                                      " in a logarithmic fit");
    if (log_x && !(t > 0.0)) throw DomainError("power-law fit needs t > 0");
    x.push_back(log_x ? std::log(t) : t);
    y.push_back(std::log(v));
  }
  if (x.size() < 2) throw DomainError("fit window holds fewer than two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit window has a single abscissa");
  FitResult r;
  r.slope = sxy / sxx;
  r.prefactor = std::exp(my - r.slope * mx);
  r.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  r.points = x.size();
  return r;
}

}  // namespace

FitResult fit_power_law(const TimeSeriesRecord& series, double t_lo, double t_hi) {
  return linear_fit(series, t_lo, t_hi, true);
}

FitResult fit_exponential(const TimeSeriesRecord& series, double t_lo, double t_hi) {
  return linear_fit(series, t_lo, t_hi, false);
}

}  // namespace scramble
