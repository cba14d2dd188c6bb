// SPDX-License-Identifier: Apache-2.0
#include "core/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace silac {

int scenario::comm_count() const {
  int n = 0;
  for (const auto& u : users)
    if (u.role == user_role::comm) ++n;
  return n;
}

int scenario::loc_count() const { return static_cast<int>(users.size()) - comm_count(); }

std::vector<double> scenario::loc_angles() const {
  std::vector<double> a;
  for (const auto& u : users)
    if (u.role == user_role::loc) a.push_back(u.theta);
  return a;
}

cvec los_channel(const array_geometry& geom, double theta, cdouble beta) {
  return beta * steering_vector(geom, theta);
}

one_ring_paths draw_one_ring_paths(double theta_center, const channel_model& ch,
                                   rng& gen) {
  if (ch.paths < 1 || ch.ring_radius_m < 0.0 || ch.ring_radius_m >= ch.range_m)
    throw std::invalid_argument("one_ring: need L >= 1 and 0 <= R < r");
  const double spread = std::asin(ch.ring_radius_m / ch.range_m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ch.paths));
  one_ring_paths p;
  p.gains.reserve(ch.paths);
  p.angles.reserve(ch.paths);
  for (int l = 0; l < ch.paths; ++l) {
    p.gains.push_back(gen.cnormal() * scale);
    double a = gen.uniform(theta_center - spread, theta_center + spread);
    if (a < -0.5 * kPi || a > 0.5 * kPi) {
      a = std::clamp(a, -0.5 * kPi, 0.5 * kPi);
      p.clamped = true;
    }
    p.angles.push_back(a);
  }
  return p;
}

cvec assemble_one_ring(const array_geometry& geom, const one_ring_paths& paths) {
  cvec h = cvec::Zero(geom.element_count());
  for (size_t l = 0; l < paths.gains.size(); ++l)
    h += paths.gains[l] * steering_vector(geom, paths.angles[l]);
  return h;
}

cvec one_ring_channel(const array_geometry& geom, double theta_center,
                      const channel_model& ch, rng& gen, bool* clamped) {
  const auto paths = draw_one_ring_paths(theta_center, ch, gen);
  if (clamped) *clamped = paths.clamped;
  return assemble_one_ring(geom, paths);
}

cvec draw_channel(const array_geometry& geom, const user_config& user, rng& gen) {
  if (user.channel.kind == channel_model::kind_t::los)
    return los_channel(geom, user.theta, user.channel.los_gain);
  return one_ring_channel(geom, user.theta, user.channel, gen);
}

snapshot_block assemble_block(const scenario& sc, std::vector<cvec> channels,
                              cmat symbols, const cmat& noise) {
  const int k = static_cast<int>(sc.users.size());
  const int t = sc.snapshots;
  const int m = static_cast<int>(noise.rows());
  if (static_cast<int>(channels.size()) != k || symbols.rows() != k ||
      symbols.cols() != t || noise.cols() != t)
    throw std::invalid_argument("assemble_block: dimension mismatch");
  snapshot_block b;
  b.channels = std::move(channels);
  b.symbols = std::move(symbols);
  b.y_comm = cmat::Zero(m, t);
  cmat y_loc = cmat::Zero(m, t);
  for (int u = 0; u < k; ++u) {
    const double amp = std::sqrt(sc.users[u].power);
    cmat contrib = b.channels[u] * (amp * b.symbols.row(u));
    if (sc.users[u].role == user_role::comm)
      b.y_comm += contrib;
    else
      y_loc += contrib;
  }
  b.y = b.y_comm + y_loc + noise;
  return b;
}

snapshot_block generate_snapshots(const scenario& sc, const array_geometry& geom,
                                  rng& gen) {
  if (sc.users.empty()) throw std::invalid_argument("scenario has no users");
  if (sc.snapshots < 1) throw std::invalid_argument("scenario needs T >= 1");
  const int k = static_cast<int>(sc.users.size());
  const int t = sc.snapshots;
  const int m = geom.element_count();

  std::vector<cvec> channels;
  channels.reserve(k);
  for (const auto& u : sc.users) channels.push_back(draw_channel(geom, u, gen));

  cmat symbols(k, t);
  for (int u = 0; u < k; ++u)
    for (int n = 0; n < t; ++n) symbols(u, n) = gen.cnormal();

  const double sigma = std::sqrt(sc.noise_power);
  cmat noise(m, t);
  for (int n = 0; n < t; ++n)
    for (int i = 0; i < m; ++i) noise(i, n) = sigma * gen.cnormal();

  return assemble_block(sc, std::move(channels), std::move(symbols), noise);
}

cmat localization_residual(const snapshot_block& block, const scenario& sc) {
  (void)sc;
  return block.y - block.y_comm;
}

cmat sample_covariance(const cmat& block) {
  if (block.cols() < 1) throw std::invalid_argument("sample_covariance: T >= 1");
  cmat r = block * block.adjoint();
  r /= static_cast<double>(block.cols());
  return r;
}

}  // namespace silac
