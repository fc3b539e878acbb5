#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subspec/error.hpp"

namespace subspec {

enum class ScanVerdict { Growth, Bounded, Inconclusive };

inline std::string to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::Growth: return "Growth";
    case ScanVerdict::Bounded: return "Bounded";
    case ScanVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Finite scans cannot see limits, so the verdict is an explicit heuristic:
/// Growth if 0 < growth_factor * first < last and log(values) has positive least-squares slope;
/// Bounded if max(second half) / max(first half) < bounded_ratio; otherwise Inconclusive.
struct ScanThresholds {
  double growth_factor = 4.0;
  double bounded_ratio = 1.25;
};

inline double log_slope(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::log(std::max(values[i], 1e-300));
    mx += static_cast<double>(i);
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (static_cast<double>(i) - mx) * (y[i] - my);
    sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
  }
  return sxy / sxx;
}

inline ScanVerdict classify_scan(const std::vector<double>& values, const ScanThresholds& t = {}) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty scan");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "scan contains non-finite values");
  if (values.size() < 2) return ScanVerdict::Inconclusive;
  double first = values.front(), last = values.back();
  if (first > 0.0 && last > t.growth_factor * first && log_slope(values) > 0.0) return ScanVerdict::Growth;
  std::size_t half = values.size() / 2;
  double head = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(half));
  double tail = *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(half), values.end());
  if (head > 0.0 ? tail / head < t.bounded_ratio : tail <= 0.0) return ScanVerdict::Bounded;
  return ScanVerdict::Inconclusive;
}

}  // namespace subspec
