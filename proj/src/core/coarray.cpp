// SPDX-License-Identifier: Apache-2.0
#include "core/coarray.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "core/beampattern.hpp"

namespace silac {

int coarray::index_of(int lag) const {
  auto it = std::lower_bound(lags.begin(), lags.end(), lag);
  if (it == lags.end() || *it != lag) return -1;
  return static_cast<int>(it - lags.begin());
}

std::vector<int> coarray::holes() const {
  std::vector<int> h;
  const int max_lag = lags.back();
  for (int l = 1; l < max_lag; ++l)
    if (index_of(l) < 0) h.push_back(l);
  return h;
}

coarray difference_coarray(const array_geometry& geom) {
  coarray ca;
  ca.positions = geom.positions;
  const int m = geom.element_count();
  std::map<int, std::vector<std::pair<int, int>>> table;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      table[geom.positions[i] - geom.positions[j]].push_back({i, j});
  ca.lags.reserve(table.size());
  for (auto& [lag, pairs] : table) {
    ca.lags.push_back(lag);
    ca.weights.push_back(static_cast<int>(pairs.size()));
    ca.pair_map.push_back(std::move(pairs));
  }
  int l = 0;
  while (ca.index_of(l + 1) >= 0) ++l;
  ca.half_len = l;
  return ca;
}

cvec virtualize(const cmat& r, const coarray& ca) {
  const int m = ca.physical_m();
  if (r.rows() != m || r.cols() != m)
    throw std::invalid_argument("virtualize: covariance size does not match co-array");
  const int l = ca.half_len;
  cvec z(2 * l + 1);
  for (int lag = -l; lag <= l; ++lag) {
    const int idx = ca.index_of(lag);
    cdouble acc = 0.0;
    for (const auto& [i, j] : ca.pair_map[idx]) acc += r(i, j);
    z(lag + l) = acc / static_cast<double>(ca.weights[idx]);
  }
  return z;
}

cmat spatial_smoothing(const cvec& z_s) {
  const int n = static_cast<int>(z_s.size());
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("spatial_smoothing: need an odd segment of length >= 3");
  const int l = (n - 1) / 2;
  cmat r_ss = cmat::Zero(l + 1, l + 1);
  for (int i = 0; i <= l; ++i) {
    const cvec w = z_s.segment(i, l + 1);
    r_ss.noalias() += w * w.adjoint();
  }
  r_ss /= static_cast<double>(l + 1);
  return r_ss;
}

double type1_pattern(const coarray& ca, double delta, bool selected) {
  if (selected) {
    const int n = ca.m_svir();
    const double d = dirichlet_ratio(delta, n);
    return d * d / (static_cast<double>(n) * n);
  }
  cdouble s = 0.0;
  for (size_t k = 0; k < ca.lags.size(); ++k)
    s += static_cast<double>(ca.weights[k]) * std::polar(1.0, kPi * ca.lags[k] * delta);
  const double m = ca.physical_m();
  return std::norm(s) / (m * m * m * m);
}

double type2_pattern(const array_geometry& geom, const coarray& ca,
                     double delta_ki, double delta_kj, bool selected) {
  if (!selected) {
    // Literal virtual-channel inner product over all M^2 element pairs.
    cdouble s = 0.0;
    for (int p : geom.positions)
      for (int q : geom.positions)
        s += std::polar(1.0, kPi * (p * delta_kj - q * delta_ki));
    const double m = geom.element_count();
    return std::norm(s) / (m * m * m * m);
  }
  const int l = ca.half_len;
  cdouble s = 0.0;
  for (int lag = -l; lag <= l; ++lag) {
    const auto& pairs = ca.pair_map[ca.index_of(lag)];
    // Representative decomposition: the pair with the smallest p.
    const auto rep = *std::min_element(
        pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
          return ca.positions[a.first] < ca.positions[b.first];
        });
    const double p = ca.positions[rep.first];
    const double q = ca.positions[rep.second];
    s += std::polar(1.0, kPi * (p * delta_ki - q * delta_kj));
  }
  const double n = ca.m_svir();
  return std::norm(s) / (n * n);
}

virtual_snr virtual_snr_closed(int m, double rho) {
  if (m < 1 || rho <= 0.0)
    throw std::invalid_argument("virtual_snr_closed: need M >= 1 and rho > 0");
  virtual_snr s;
  s.phy = m * rho;
  s.vir = 2.0 * m * m * rho * rho / (2.0 * m * rho + (m + 1.0) / m);
  return s;
}

virtual_snr_mc_result virtual_snr_mc(const array_geometry& geom, double rho,
                                     long long trials, rng& gen) {
  if (trials < 1) throw std::invalid_argument("virtual_snr_mc: trials >= 1");
  const int m = geom.element_count();
  const cvec a = steering_vector(geom, 0.3);
  const double amp = std::sqrt(rho);  // beta = 1, P = rho, sigma^2 = 1

  double sig_acc = 0.0, noise_acc = 0.0, quartic_acc = 0.0;
  cdouble cross_acc = 0.0;
  double cross_sq_acc = 0.0;
  for (long long t = 0; t < trials; ++t) {
    const cdouble x = gen.cnormal();
    cdouble g = 0.0;  // a^H n
    for (int i = 0; i < m; ++i) g += std::conj(a(i)) * gen.cnormal();
    const double sig = m * rho * std::norm(x);
    const cdouble lin = std::conj(g) * amp * std::conj(x) + g * amp * x;
    const double quart = std::norm(g) / m;
    const double noise = std::norm(lin + quart);
    const cdouble cross = std::conj(g) * amp * std::conj(x) * quart;
    sig_acc += sig * sig;
    noise_acc += noise;
    quartic_acc += quart * quart;
    cross_acc += cross;
    cross_sq_acc += std::norm(cross);
  }
  virtual_snr_mc_result r;
  r.trials = trials;
  r.signal_power = sig_acc / trials;
  r.noise_power = noise_acc / trials;
  r.quartic_mean = quartic_acc / trials;
  r.snr = r.signal_power / r.noise_power;
  r.cross_moment = cross_acc / static_cast<double>(trials);
  const double var = cross_sq_acc / trials - std::norm(r.cross_moment);
  r.cross_moment_se = std::sqrt(std::max(var, 0.0) / trials);
  return r;
}

Eigen::VectorXd virtual_mrc_statistic(const array_geometry& geom, double theta,
                                      const cmat& block) {
  const int m = geom.element_count();
  if (block.rows() != m)
    throw std::invalid_argument("virtual_mrc_statistic: block row count != M");
  const cvec a = steering_vector(geom, theta);
  Eigen::VectorXd eta(block.cols());
  for (Eigen::Index n = 0; n < block.cols(); ++n) {
    cdouble s = 0.0;
    for (int i = 0; i < m; ++i) s += std::conj(a(i)) * block(i, n);
    eta(n) = (s.real() * s.real() + s.imag() * s.imag()) / m;
  }
  return eta;
}

nlohmann::json coarray_to_json(const coarray& ca) {
  nlohmann::json j;
  j["m"] = ca.physical_m();
  j["lags"] = ca.lags;
  j["weights"] = ca.weights;
  j["holes"] = ca.holes();
  j["m_vir"] = ca.m_vir();
  j["m_svir"] = ca.m_svir();
  j["half_len"] = ca.half_len;
  return j;
}

}  // namespace silac
