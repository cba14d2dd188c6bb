// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/estimation.hpp"
#include "core/signal_model.hpp"

namespace silac {

inline constexpr const char* kToolVersion = "1.0.0";

/// Scenario template shared by the experiments: K users equally spaced in
/// [-theta_max, theta_max], the first k_c communicating, all with the same
/// transmit power 10^(snr_db/10) (sigma^2 = 1).
struct scenario_spec {
  int k = 30;
  int k_c = 30;
  double theta_max_deg = 6.0;
  double snr_db = 20.0;
  channel_model channel{channel_model::kind_t::one_ring, 1.0, 10, 5.0, 40.0};
  double loc_power_scale = 1.0;  // L-UE power relative to C-UEs
};

struct experiment_config {
  std::string experiment = "rate_sweep";
  std::vector<arch_params> geometries;
  scenario_spec scenario;
  int trials = 50;
  int snapshots = 200;
  uint64_t seed = 1;
  double grid_step = 1e-3;       // spectrum search step (rad)
  double beam_grid_step = 1e-3;  // beampattern CSV step (spatial angle)
  int threads = 0;               // 0 = hardware concurrency
  std::string estimator = "bartlett";
  int sweep_m = 16;                      // joint_eval / centric_sweep / dof
  std::vector<double> theta_max_list;    // centric_sweep
  std::vector<int> lue_counts;           // dof
  std::vector<int> snr_m_list{4, 8, 16};
  std::vector<double> snr_rho_db_list{-10.0, 0.0, 10.0, 30.0};
  long long snr_trials = 100000;
  bool full_scale = false;  // trials = 500, snapshots = 1000
  std::string out_dir = "results";

  static experiment_config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Applies the full-scale switch and fills experiment-specific defaults.
  void resolve();
};

scenario build_hotspot_scenario(int k, int k_c, double theta_max_deg,
                                double snr_db, int snapshots,
                                const channel_model& ch,
                                double loc_power_scale = 1.0);

struct trial_record {
  uint64_t seed = 0;
  double sum_rate = 0.0;
  double rmse = 0.0;
};

struct config_record {
  arch_params arch;
  double rate_mean = 0.0, rate_std = 0.0;
  double rmse_mean = 0.0, rmse_std = 0.0, rmse_median = 0.0;
  std::vector<trial_record> trials;
};

struct experiment_result {
  std::string experiment;
  uint64_t seed = 0;
  std::string config_hash;
  std::string version = kToolVersion;
  std::vector<config_record> records;
  nlohmann::json extra;  // experiment-specific tables
  std::string csv;       // main tabular output

  nlohmann::json to_json() const;
};

/// Runs the experiment named by config.experiment.
experiment_result run_experiment(const experiment_config& cfg);

experiment_result run_rate_sweep(const experiment_config& cfg);
experiment_result run_joint_eval(const experiment_config& cfg);
experiment_result run_centric_sweep(const experiment_config& cfg);
experiment_result run_dof(const experiment_config& cfg);
experiment_result run_snr_compare(const experiment_config& cfg);
experiment_result run_beampattern(const experiment_config& cfg);
experiment_result run_coarray_report(const experiment_config& cfg);

/// Indices of the non-dominated points under (rate higher better, rmse lower
/// better) weak dominance; exact duplicates collapse to their first
/// occurrence; result ordered by ascending rate.
std::vector<size_t> pareto_front_indices(
    const std::vector<std::pair<double, double>>& rate_rmse);

/// Nested (N1 >= 1, N2 >= 1, N1+N2 = m) and co-prime (2*M1+M2-1 = m,
/// M1 < M2, gcd 1) parameter sets with exactly m elements.
std::vector<arch_params> enumerate_nested(int m);
std::vector<arch_params> enumerate_coprime(int m);

/// Writes <experiment>.json and <experiment>.csv (plus any per-geometry
/// files in result.extra["files"]) under cfg.out_dir. Output bytes are a
/// pure function of (config, seed).
void write_outputs(const experiment_result& result, const experiment_config& cfg);

/// FNV-1a over the canonical config serialization.
std::string config_hash(const nlohmann::json& j);

uint64_t trial_seed(uint64_t base, uint64_t trial);

/// Runs fn(0..n-1) on up to `threads` workers; results must be written to
/// per-index slots so the outcome is independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Localization run from a scenario description:
/// {"geometry": {...}, "users": [...], "snr_db", "snapshots", "seed"}.
/// Returns the report and, when out_dir is non-empty, writes
/// localize_spectrum.csv / localize_report.json there.
nlohmann::json run_localize(const nlohmann::json& scenario_json,
                            const std::string& estimator, double grid_step,
                            const std::string& out_dir);

scenario scenario_from_json(const nlohmann::json& j, arch_params* arch_out,
                            uint64_t* seed_out);

}  // namespace silac
