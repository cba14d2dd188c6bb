// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace silac {

/// One splitmix64 mixing step. Used to derive decorrelated stream seeds so
/// that per-trial streams are independent of execution order and thread count.
uint64_t splitmix64(uint64_t x);

/// Deterministic random source. All transforms (uniform, Gaussian) are
/// implemented explicitly on top of std::mt19937_64 so that a given seed
/// produces the same stream everywhere; std::*_distribution is avoided
/// because its output is implementation-defined.
class rng {
 public:
  explicit rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal, Box-Muller (pairs cached).
  double normal();

  /// Circularly symmetric complex Gaussian CN(0, 1):
  /// E{z} = 0, E{|z|^2} = 1, real/imag parts N(0, 1/2).
  std::complex<double> cnormal();

  /// Derived seed for sub-stream `stream` of a base seed.
  static uint64_t derive(uint64_t base, uint64_t stream);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace silac
