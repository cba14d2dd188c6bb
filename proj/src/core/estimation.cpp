// SPDX-License-Identifier: Apache-2.0
#include "core/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace silac {

std::vector<double> angle_grid(double step_rad) {
  if (step_rad <= 0.0) throw std::invalid_argument("angle_grid: step must be > 0");
  const long long n = static_cast<long long>(std::floor(0.5 * kPi / step_rad));
  std::vector<double> grid;
  grid.reserve(2 * n + 1);
  for (long long k = -n; k <= n; ++k) grid.push_back(k * step_rad);
  return grid;
}

steering_fn physical_steering(const array_geometry& geom) {
  return [geom](double theta) { return steering_vector(geom, theta); };
}

steering_fn virtual_ula_steering(int n) {
  return [n](double theta) {
    const double s = std::sin(theta);
    cvec a(n);
    for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, kPi * k * s);
    return a;
  };
}

steering_fn virtual_lag_steering(int l) {
  return [l](double theta) {
    const double s = std::sin(theta);
    cvec a(2 * l + 1);
    for (int k = -l; k <= l; ++k) a(k + l) = std::polar(1.0, kPi * k * s);
    return a;
  };
}

spectrum_result bartlett_spectrum(const cmat& cov, const steering_fn& steer,
                                  const std::vector<double>& grid,
                                  spectrum_domain domain) {
  if (cov.rows() != cov.cols()) throw std::invalid_argument("bartlett: covariance not square");
  spectrum_result r;
  r.grid = grid;
  r.domain = domain;
  r.values.reserve(grid.size());
  for (double theta : grid) {
    const cvec a = steer(theta);
    if (a.size() != cov.rows())
      throw std::invalid_argument("bartlett: steering length != covariance size");
    const double num = std::real(cdouble(a.adjoint() * cov * a));
    r.values.push_back(std::max(num, 0.0) / a.squaredNorm());
  }
  return r;
}

spectrum_result music_spectrum(const cmat& r_ss, int n_sources,
                               const steering_fn& steer,
                               const std::vector<double>& grid,
                               spectrum_domain domain) {
  const int dim = static_cast<int>(r_ss.rows());
  if (r_ss.cols() != dim) throw std::invalid_argument("music: covariance not square");
  if (n_sources < 1 || n_sources >= dim)
    throw std::invalid_argument("music: need 1 <= n_sources < dim");
  Eigen::SelfAdjointEigenSolver<cmat> es(r_ss);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("music: eigendecomposition failed");
  // Eigenvalues ascending: the first dim - n_sources columns span the noise
  // subspace.
  const int noise_dim = dim - n_sources;
  const cmat e_n = es.eigenvectors().leftCols(noise_dim);

  spectrum_result r;
  r.grid = grid;
  r.domain = domain;
  const double gap = es.eigenvalues()(noise_dim) - es.eigenvalues()(noise_dim - 1);
  r.unstable = gap < 1e-9;
  r.values.reserve(grid.size());
  for (double theta : grid) {
    const cvec a = steer(theta);
    if (a.size() != dim)
      throw std::invalid_argument("music: steering length != covariance size");
    const double denom = (e_n.adjoint() * a).squaredNorm();
    r.values.push_back(1.0 / std::max(denom, 1e-300));
  }
  return r;
}

std::vector<double> find_peaks(const spectrum_result& spec, int k) {
  if (k < 1) throw std::invalid_argument("find_peaks: k >= 1");
  const auto& v = spec.values;
  const auto& g = spec.grid;
  const int n = static_cast<int>(v.size());
  struct peak {
    double theta;
    double value;
  };
  std::vector<peak> peaks;
  int i = 1;
  while (i < n - 1) {
    if (v[i] > v[i - 1]) {
      int j = i;
      while (j + 1 < n && v[j + 1] == v[i]) ++j;
      if (j + 1 < n && v[i] > v[j + 1]) {
        const int c = (i + j) / 2;
        double theta = g[c];
        // Parabolic refinement through the three surrounding samples.
        const double y0 = v[c - 1], y1 = v[c], y2 = v[c + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
          double off = 0.5 * (y0 - y2) / denom;
          off = std::clamp(off, -1.0, 1.0);
          theta += off * (g[c + 1] - g[c]);
        }
        peaks.push_back({theta, v[c]});
        i = j + 1;
        continue;
      }
      i = j + 1;
      continue;
    }
    ++i;
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const peak& a, const peak& b) { return a.value > b.value; });
  if (static_cast<int>(peaks.size()) > k) peaks.resize(k);
  std::vector<double> out;
  out.reserve(peaks.size());
  for (const auto& p : peaks) out.push_back(p.theta);
  std::sort(out.begin(), out.end());
  return out;
}

estimate_report score_rmse(std::vector<double> truth, std::vector<double> estimates,
                           double missing_penalty) {
  if (truth.empty()) throw std::invalid_argument("score_rmse: no true angles");
  std::sort(truth.begin(), truth.end());
  std::sort(estimates.begin(), estimates.end());
  estimate_report rep;
  rep.truth = truth;
  rep.estimates = estimates;

  double min_sep = kPi;
  for (size_t i = 1; i < truth.size(); ++i)
    min_sep = std::min(min_sep, truth[i] - truth[i - 1]);
  const double resolve_tol = truth.size() > 1 ? 0.5 * min_sep : 0.5 * kPi;

  const size_t paired = std::min(truth.size(), estimates.size());
  double sq = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    double err;
    if (i < paired) {
      err = truth[i] - estimates[i];
    } else {
      err = missing_penalty;
    }
    sq += err * err;
    const bool ok = i < paired && std::abs(err) <= resolve_tol;
    rep.resolved.push_back(ok);
    if (ok) ++rep.resolved_count;
  }
  rep.rmse = std::sqrt(sq / truth.size());
  return rep;
}

estimator_kind estimator_from_string(const std::string& name) {
  if (name == "bartlett") return estimator_kind::bartlett;
  if (name == "bartlett-smoothed" || name == "bartlett_smoothed")
    return estimator_kind::bartlett_smoothed;
  if (name == "music") return estimator_kind::music;
  throw std::invalid_argument("unknown estimator: " + name);
}

spectrum_result coarray_spectrum(const cmat& sample_cov, const coarray& ca,
                                 estimator_kind kind, int n_sources,
                                 const std::vector<double>& grid) {
  const cvec z = virtualize(sample_cov, ca);
  const int l = ca.half_len;
  if (kind == estimator_kind::bartlett) {
    // Single-snapshot matched filter over the full contiguous virtual ULA.
    spectrum_result r;
    r.grid = grid;
    r.domain = spectrum_domain::coarray;
    const auto steer = virtual_lag_steering(l);
    const double norm = static_cast<double>(2 * l + 1);
    r.values.reserve(grid.size());
    for (double theta : grid) {
      const cvec b = steer(theta);
      r.values.push_back(std::norm(cdouble(b.adjoint() * z)) / norm);
    }
    return r;
  }
  const cmat r_ss = spatial_smoothing(z);
  if (kind == estimator_kind::bartlett_smoothed)
    return bartlett_spectrum(r_ss, virtual_ula_steering(l + 1), grid,
                             spectrum_domain::coarray);
  return music_spectrum(r_ss, n_sources, virtual_ula_steering(l + 1), grid,
                        spectrum_domain::coarray);
}

}  // namespace silac
