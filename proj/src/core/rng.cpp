// SPDX-License-Identifier: Apache-2.0
#include "core/rng.hpp"

#include <cmath>

namespace silac {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> rng::cnormal() {
  // |z|^2 ~ Exp(1), phase uniform.
  double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform();
  double r = std::sqrt(-std::log(u1));
  double a = kTwoPi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

uint64_t rng::derive(uint64_t base, uint64_t stream) {
  return splitmix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

}  // namespace silac
