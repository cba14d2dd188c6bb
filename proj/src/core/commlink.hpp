// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/geometry.hpp"

namespace silac {

/// MRC beamformer v = h / ||h||. Throws on a zero channel.
cvec mrc(const cvec& h);

/// gamma_k = P_k |v_k^H h_k|^2 / (sum_{i != k} P_i |v_k^H h_i|^2 + sigma^2)
/// with v_k the MRC beamformer of user k.
double user_sinr(int k, const std::vector<cvec>& channels,
                 const std::vector<double>& powers, double noise_power);

struct link_result {
  std::vector<double> sinr;  // per comm user
  std::vector<double> rate;  // log2(1 + sinr)
  double sum_rate = 0.0;
};

/// Rates of the first `comm_count` users (interference from every user).
link_result sum_rate(const std::vector<cvec>& channels,
                     const std::vector<double>& powers, double noise_power,
                     int comm_count);

/// LoS closed form: gamma_k = Pbar_k M / (M sum_{i != k} Pbar_i G(delta_ki) + 1)
/// with Pbar the receive SNRs and G the physical beam pattern.
std::vector<double> los_sinr_closed(const array_geometry& geom,
                                    const std::vector<double>& angles,
                                    const std::vector<double>& receive_snr);

}  // namespace silac
