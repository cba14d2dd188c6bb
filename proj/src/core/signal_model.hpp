// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace silac {

enum class user_role { comm, loc };

struct channel_model {
  enum class kind_t { los, one_ring };
  kind_t kind = kind_t::los;
  double los_gain = 1.0;       // |beta| of the LoS path
  int paths = 10;              // L_k, one-ring
  double ring_radius_m = 5.0;  // R
  double range_m = 40.0;       // r; angular spread = asin(R/r)
};

struct user_config {
  user_role role = user_role::comm;
  double theta = 0.0;   // radians
  double power = 1.0;   // transmit power P_k (E|x|^2 = 1)
  channel_model channel;
};

/// Uplink scenario; comm users come first.
struct scenario {
  std::vector<user_config> users;
  double noise_power = 1.0;  // sigma^2
  int snapshots = 200;       // T

  int comm_count() const;
  int loc_count() const;
  std::vector<double> loc_angles() const;
};

/// LoS channel h = beta * a(theta).
cvec los_channel(const array_geometry& geom, double theta, cdouble beta);

/// One-ring path draw: L i.i.d. CN(0, 1/L) gains, path angles uniform on
/// [theta +- asin(R/r)], clamped to [-pi/2, pi/2] (clamped flag set if so).
struct one_ring_paths {
  std::vector<cdouble> gains;
  std::vector<double> angles;
  bool clamped = false;
};
one_ring_paths draw_one_ring_paths(double theta_center, const channel_model& ch,
                                   rng& gen);

cvec assemble_one_ring(const array_geometry& geom, const one_ring_paths& paths);

cvec one_ring_channel(const array_geometry& geom, double theta_center,
                      const channel_model& ch, rng& gen, bool* clamped = nullptr);

/// Channel for a user under its configured model.
cvec draw_channel(const array_geometry& geom, const user_config& user, rng& gen);

/// One coherence block: y[n] = sum_k h_k sqrt(P_k) x_k[n] + n[n], channels
/// drawn once and held fixed over the T snapshots. The comm-user component
/// is kept separately for perfect cancellation.
struct snapshot_block {
  cmat y;        // M x T
  cmat y_comm;   // comm-user contribution, M x T
  std::vector<cvec> channels;  // per user
  cmat symbols;  // K x T, CN(0,1)
};

/// Deterministic draw order: channels (user order), then symbols (per user,
/// per snapshot), then noise (per snapshot, per element).
snapshot_block generate_snapshots(const scenario& sc, const array_geometry& geom,
                                  rng& gen);

/// Assembles a block from externally supplied channels, symbols and noise
/// (test hook; generate_snapshots delegates here).
snapshot_block assemble_block(const scenario& sc, std::vector<cvec> channels,
                              cmat symbols, const cmat& noise);

/// y_l[n]: the block with all comm-user signals subtracted (perfect
/// cancellation; Gaussian localization probing retained).
cmat localization_residual(const snapshot_block& block, const scenario& sc);

/// R = (1/T) sum_n y[n] y[n]^H.
cmat sample_covariance(const cmat& block);

}  // namespace silac
