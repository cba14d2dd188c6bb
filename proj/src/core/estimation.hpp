// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/coarray.hpp"
#include "core/geometry.hpp"

namespace silac {

enum class spectrum_domain { physical, coarray };

struct spectrum_result {
  std::vector<double> grid;    // radians
  std::vector<double> values;  // non-negative
  spectrum_domain domain = spectrum_domain::physical;
  bool unstable = false;  // set by MUSIC when the subspace split is degenerate
};

using steering_fn = std::function<cvec(double)>;

/// Uniform grid over [-pi/2, pi/2] with the given step (always includes 0).
std::vector<double> angle_grid(double step_rad);

steering_fn physical_steering(const array_geometry& geom);
/// Virtual ULA steering on positions 0..n-1 (smoothed-covariance domain).
steering_fn virtual_ula_steering(int n);
/// Virtual ULA steering on lags -l..l (single-snapshot co-array domain).
steering_fn virtual_lag_steering(int l);

/// values[g] = a^H Cov a / ||a||^2.
spectrum_result bartlett_spectrum(const cmat& cov, const steering_fn& steer,
                                  const std::vector<double>& grid,
                                  spectrum_domain domain = spectrum_domain::physical);

/// values[g] = 1 / ||E_n^H a||^2 with E_n the noise subspace of the
/// smoothed covariance (eigenvectors of the dim - n_sources smallest
/// eigenvalues). `unstable` is reported when the signal/noise eigenvalue
/// gap is below 1e-9.
spectrum_result music_spectrum(const cmat& r_ss, int n_sources,
                               const steering_fn& steer,
                               const std::vector<double>& grid,
                               spectrum_domain domain = spectrum_domain::coarray);

/// The k largest strict local maxima (plateau-tolerant), each refined by
/// 3-point parabolic interpolation; returned sorted ascending by angle.
/// Fewer are returned when fewer exist.
std::vector<double> find_peaks(const spectrum_result& spec, int k);

struct estimate_report {
  std::vector<double> truth;      // sorted
  std::vector<double> estimates;  // sorted
  std::vector<bool> resolved;     // per true source
  double rmse = 0.0;
  int resolved_count = 0;
};

/// Sort-and-pair matching; each unmatched true source contributes
/// `missing_penalty` (default: half the scan range) to the RMSE.
estimate_report score_rmse(std::vector<double> truth, std::vector<double> estimates,
                           double missing_penalty = 0.5 * kPi);

enum class estimator_kind { bartlett, bartlett_smoothed, music };
estimator_kind estimator_from_string(const std::string& name);

/// Co-array-domain spectrum from a physical sample covariance:
///   bartlett          matched filter |b^H z_s|^2 on the full contiguous lags
///   bartlett_smoothed Bartlett on the (L+1)x(L+1) smoothed covariance
///   music             MUSIC on the smoothed covariance (needs n_sources)
spectrum_result coarray_spectrum(const cmat& sample_cov, const coarray& ca,
                                 estimator_kind kind, int n_sources,
                                 const std::vector<double>& grid);

}  // namespace silac
