#include "scramble/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scramble/errors.hpp"

namespace scramble {

void TimeSeriesRecord::validate() const {
  if (times.size() != values.size()) {
    throw DomainError("time series '" + label + "' has " + std::to_string(times.size()) +
                      " times but " + std::to_string(values.size()) + " values");
  }
}

double TimeSeriesRecord::at(double t) const {
  validate();
  if (times.empty()) throw DomainError("time series '" + label + "' is empty");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

void TimeSeriesRecord::set_meta(const std::string& key, double value) {
  metadata[key] = format_double(value);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<double> uniform_times(double t_max, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (t_max < 0.0) throw DomainError("t_max must be non-negative");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-6));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = static_cast<double>(i) * dt;
  return out;
}

}  // namespace scramble
