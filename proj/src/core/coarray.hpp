// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace silac {

/// Difference co-array of a physical position set: every ordered pair
/// difference d_i - d_j, with multiplicities and the index pairs that
/// generate each lag.
struct coarray {
  std::vector<int> positions;  // physical positions (copy)
  std::vector<int> lags;       // ascending, symmetric about 0
  std::vector<int> weights;    // occurrence count per lag
  // Element index pairs (i, j) with positions[i] - positions[j] == lag.
  std::vector<std::vector<std::pair<int, int>>> pair_map;
  int half_len = 0;  // L: largest L with {-L..L} subset of lags

  int physical_m() const { return static_cast<int>(positions.size()); }
  int m_vir() const { return static_cast<int>(lags.size()); }
  int m_svir() const { return 2 * half_len + 1; }
  /// Index into lags/weights/pair_map, or -1 when the lag is absent.
  int index_of(int lag) const;
  /// Missing positive lags below the maximum lag.
  std::vector<int> holes() const;
};

coarray difference_coarray(const array_geometry& geom);

/// Vectorized covariance reindexed by lag and averaged over redundant
/// entries, restricted to the contiguous segment -L..L (entry l+L <-> lag l).
/// A Hermitian input yields a conjugate-symmetric output.
cvec virtualize(const cmat& r, const coarray& ca);

/// Forward spatial smoothing of the single-snapshot virtual signal:
/// (L+1)x(L+1) average of the L+1 sliding windows of length L+1. The window
/// starting at lag -L+i is z_s[i..i+L]. Output is Hermitian PSD.
cmat spatial_smoothing(const cvec& z_s);

/// Same-user interference pattern in the virtual domain.
/// selected = false: weighted full-co-array pattern
///   |sum_m w_m exp(j*pi*lag_m*delta)|^2 / M^4 (unity at delta = 0).
/// selected = true: contiguous virtual ULA pattern
///   |sum_{l=-L..L} exp(j*pi*l*delta)|^2 / M_svir^2.
double type1_pattern(const coarray& ca, double delta, bool selected);

/// Cross-user interference pattern in the virtual domain.
/// selected = false: full M^2-pair evaluation; equals
///   G(delta_ki) * G(-delta_kj) by the Kronecker factorization.
/// selected = true: one representative decomposition (p, q) per retained lag
///   (the pair with the smallest p), |sum exp(j*pi*(p*dki - q*dkj))|^2/M_svir^2.
double type2_pattern(const array_geometry& geom, const coarray& ca,
                     double delta_ki, double delta_kj, bool selected);

/// Closed-form virtual-array SNR after MRC on the self-correlated signal,
/// with sigma^2 = 1 and receive SNR rho = P|beta|^2/sigma^2:
///   snr_phy = M*rho
///   snr_vir = 2*M^2*rho^2 / (2*M*rho + (M+1)/M)  <=  snr_phy.
struct virtual_snr {
  double vir = 0.0;
  double phy = 0.0;
};
virtual_snr virtual_snr_closed(int m, double rho);

/// Monte Carlo estimate of the virtual-array SNR plus the moments used in
/// its derivation (for verification against the closed form).
struct virtual_snr_mc_result {
  double snr = 0.0;           // signal_power / noise_power
  double signal_power = 0.0;  // mean (M*rho*|x|^2)^2, expect 2*M^2*rho^2
  double noise_power = 0.0;   // mean |linear + quartic noise terms|^2
  double quartic_mean = 0.0;  // mean (|a^H n|^2 / M)^2, expect (M+1)/M
  std::complex<double> cross_moment{0.0, 0.0};  // linear x quartic term, expect 0
  double cross_moment_se = 0.0;
  long long trials = 0;
};
virtual_snr_mc_result virtual_snr_mc(const array_geometry& geom, double rho,
                                     long long trials, rng& gen);

/// Per-snapshot virtual-array MRC detection statistic
/// eta[n] = w^H vec(y[n] y[n]^H) with w = (a^* kron a)/M = |a^H y[n]|^2 / M.
Eigen::VectorXd virtual_mrc_statistic(const array_geometry& geom, double theta,
                                      const cmat& block);

nlohmann::json coarray_to_json(const coarray& ca);

}  // namespace silac
