#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace scramble {

/// Labeled (t, value) series plus the run parameters that produced it.
struct TimeSeriesRecord {
  std::string label;
  std::vector<double> times;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
  std::size_t size() const noexcept { return times.size(); }

  /// Throws DomainError when the time and value columns differ in length.
  void validate() const;

  /// Linear interpolation; clamps outside the sampled range.
  double at(double t) const;

  void set_meta(const std::string& key, double value);
  void set_meta(const std::string& key, const std::string& value) { metadata[key] = value; }
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

/// Uniform grid 0, dt, 2dt, ... up to and including t_max (within dt/1e6).
std::vector<double> uniform_times(double t_max, double dt);

}  // namespace scramble
