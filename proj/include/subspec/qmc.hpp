#pragma once

#include <boost/random/sobol.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <vector>

namespace subspec {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed from a base seed and point coordinates (bit patterns, so -0.0 != 0.0 is avoided by +0.0).
inline std::uint64_t seed_from_point(std::uint64_t seed, std::span<const double> coords, std::uint64_t salt = 0) {
  std::uint64_t h = mix64(seed ^ mix64(salt));
  for (double c : coords) {
    double v = c + 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix64(h ^ bits);
  }
  return h;
}

/// Sobol points in [0,1)^d with a Cranley–Patterson rotation drawn from `seed`.
/// Distinct seeds give independent randomizations of the same low-discrepancy set.
class ShiftedSobol {
 public:
  ShiftedSobol(std::size_t dim, std::uint64_t seed) : engine_(dim), shift_(dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& s : shift_) s = u(rng);
  }

  std::size_t dim() const { return shift_.size(); }

  void next(std::span<double> out) {
    for (std::size_t i = 0; i < shift_.size(); ++i) {
      double x = static_cast<double>(engine_()) * 0x1p-64 + shift_[i];
      out[i] = x - std::floor(x);
    }
  }

 private:
  boost::random::sobol engine_;
  std::vector<double> shift_;
};

}  // namespace subspec
