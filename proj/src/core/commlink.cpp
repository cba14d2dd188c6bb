// SPDX-License-Identifier: Apache-2.0
#include "core/commlink.hpp"

#include <cmath>
#include <stdexcept>

#include "core/beampattern.hpp"

namespace silac {

cvec mrc(const cvec& h) {
  const double n = h.norm();
  if (n <= 0.0) throw std::invalid_argument("mrc: zero channel");
  return h / n;
}

double user_sinr(int k, const std::vector<cvec>& channels,
                 const std::vector<double>& powers, double noise_power) {
  const int n = static_cast<int>(channels.size());
  if (k < 0 || k >= n) throw std::invalid_argument("user_sinr: bad user index");
  if (powers.size() != channels.size())
    throw std::invalid_argument("user_sinr: powers/channels mismatch");
  const cvec v = mrc(channels[k]);
  const double signal = powers[k] * std::norm(cdouble(v.adjoint() * channels[k]));
  double interference = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == k) continue;
    interference += powers[i] * std::norm(cdouble(v.adjoint() * channels[i]));
  }
  return signal / (interference + noise_power);
}

link_result sum_rate(const std::vector<cvec>& channels,
                     const std::vector<double>& powers, double noise_power,
                     int comm_count) {
  if (comm_count < 1 || comm_count > static_cast<int>(channels.size()))
    throw std::invalid_argument("sum_rate: bad comm user count");
  link_result r;
  for (int k = 0; k < comm_count; ++k) {
    const double g = user_sinr(k, channels, powers, noise_power);
    r.sinr.push_back(g);
    r.rate.push_back(std::log2(1.0 + g));
    r.sum_rate += r.rate.back();
  }
  return r;
}

std::vector<double> los_sinr_closed(const array_geometry& geom,
                                    const std::vector<double>& angles,
                                    const std::vector<double>& receive_snr) {
  if (angles.size() != receive_snr.size())
    throw std::invalid_argument("los_sinr_closed: angles/snr mismatch");
  const double m = geom.element_count();
  const int n = static_cast<int>(angles.size());
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    double iui = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double delta = std::sin(angles[k]) - std::sin(angles[i]);
      iui += receive_snr[i] * gain(geom, delta);
    }
    out[k] = receive_snr[k] * m / (m * iui + 1.0);
  }
  return out;
}

}  // namespace silac
