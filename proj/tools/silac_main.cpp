// SPDX-License-Identifier: Apache-2.0
//
// silac command-line simulator. All functionality is reached through the
// shared library's C interface; this binary only assembles configuration
// JSON from flags and prints results.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "silac/silac.h"

namespace {

using nlohmann::json;

struct common_opts {
  std::string config_file;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int snapshots = 0;
  double grid_step = 0.0;
  int threads = -1;
  bool full_scale = false;
};

void add_common(CLI::App* cmd, common_opts& o) {
  cmd->add_option("--config", o.config_file, "JSON configuration file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "base seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--snapshots", o.snapshots, "snapshots per block (T)");
  cmd->add_option("--grid-step", o.grid_step, "spectrum search step (rad)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--full-scale", o.full_scale,
                "paper-scale run (500 trials, 1000 snapshots)");
}

json load_config(const common_opts& o, const std::string& experiment) {
  json cfg = json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + o.config_file);
    in >> cfg;
  }
  if (!experiment.empty()) cfg["experiment"] = experiment;
  if (o.seed_set) cfg["seed"] = o.seed;
  if (o.trials > 0) cfg["trials"] = o.trials;
  if (o.snapshots > 0) cfg["snapshots"] = o.snapshots;
  if (o.grid_step > 0.0) cfg["grid_step"] = o.grid_step;
  if (o.threads >= 0) cfg["threads"] = o.threads;
  if (o.full_scale) cfg["full_scale"] = true;
  if (!o.out_dir.empty()) cfg["out"] = o.out_dir;
  return cfg;
}

json arch_json(const std::string& arch, const std::vector<int>& params) {
  return json{{"arch", arch}, {"params", params}};
}

int fail(const std::string& context) {
  std::cerr << "error: " << context << ": " << silac_last_error() << "\n";
  return 1;
}

int run_and_print(const json& cfg, bool quiet_records) {
  char* out = nullptr;
  const silac_status st = silac_run_experiment(cfg.dump().c_str(), &out);
  if (st != SILAC_OK) return fail("run_experiment");
  json result = json::parse(out);
  silac_string_free(out);
  if (quiet_records) result.erase("records");
  std::cout << result.dump(2) << "\n";
  return 0;
}

std::string summary_line(const json& result) {
  std::ostringstream os;
  os << result.value("experiment", "?") << " seed=" << result.value("seed", 0)
     << " hash=" << result.value("config_hash", "?");
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"silac - sparse-MIMO integrated localization and communication simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", silac_version());

  // --- beampattern ---------------------------------------------------
  common_opts bp_opts;
  std::string bp_arch = "nested";
  std::vector<int> bp_params{8, 8};
  double bp_beam_step = 1e-3;
  auto* bp = app.add_subcommand(
      "beampattern", "beam pattern CSV plus flmp/bw/plmr/slh metrics and bounds");
  add_common(bp, bp_opts);
  bp->add_option("--arch", bp_arch, "ula | nested | coprime");
  bp->add_option("--params", bp_params, "architecture parameters")->expected(1, 2);
  bp->add_option("--beam-grid-step", bp_beam_step, "CSV grid step in spatial angle");

  // --- coarray ---------------------------------------------------------
  common_opts ca_opts;
  std::string ca_arch = "nested";
  std::vector<int> ca_params{3, 3};
  auto* ca = app.add_subcommand("coarray",
                                "difference co-array lags, weights and holes");
  add_common(ca, ca_opts);
  ca->add_option("--arch", ca_arch, "ula | nested | coprime");
  ca->add_option("--params", ca_params, "architecture parameters")->expected(1, 2);

  // --- localize ----------------------------------------------------------
  common_opts loc_opts;
  std::string loc_estimator = "bartlett";
  auto* loc = app.add_subcommand("localize",
                                 "AoA estimation from a scenario JSON file");
  add_common(loc, loc_opts);
  loc->add_option("--estimator", loc_estimator,
                  "bartlett | bartlett-smoothed | music | bartlett-physical");

  // --- snr-compare ---------------------------------------------------------
  common_opts snr_opts;
  std::vector<int> snr_m;
  std::vector<double> snr_rho_db;
  long long snr_trials = 0;
  auto* snr = app.add_subcommand(
      "snr-compare", "physical vs virtual-array SNR (closed form and Monte Carlo)");
  add_common(snr, snr_opts);
  snr->add_option("--m", snr_m, "element counts");
  snr->add_option("--rho-db", snr_rho_db, "receive SNR grid (dB)");
  snr->add_option("--mc-trials", snr_trials, "Monte Carlo trials per point");

  // --- rate-sweep -------------------------------------------------------
  common_opts rate_opts;
  auto* rate = app.add_subcommand(
      "rate-sweep", "multi-user uplink sum rate across array architectures");
  add_common(rate, rate_opts);

  // --- joint-eval / pareto ---------------------------------------------
  common_opts joint_opts;
  int joint_m = 16;
  auto* joint = app.add_subcommand(
      "joint-eval", "sum rate and AoA RMSE for every configuration of M elements");
  add_common(joint, joint_opts);
  joint->add_option("--m", joint_m, "element count");
  common_opts pareto_opts;
  int pareto_m = 16;
  auto* pareto = app.add_subcommand("pareto", "alias of joint-eval");
  add_common(pareto, pareto_opts);
  pareto->add_option("--m", pareto_m, "element count");

  // --- centric-sweep -----------------------------------------------------
  common_opts cen_opts;
  int cen_m = 16;
  std::vector<double> cen_theta;
  auto* cen = app.add_subcommand(
      "centric-sweep",
      "communication- and localization-centric selection vs user spread");
  add_common(cen, cen_opts);
  cen->add_option("--m", cen_m, "element count");
  cen->add_option("--theta-max", cen_theta, "user spread list (degrees)");

  // --- dof -----------------------------------------------------------------
  common_opts dof_opts;
  int dof_m = 16;
  std::vector<int> dof_lue;
  auto* dof = app.add_subcommand("dof", "RMSE vs number of L-UEs per architecture");
  add_common(dof, dof_opts);
  dof->add_option("--m", dof_m, "element count");
  dof->add_option("--lue", dof_lue, "L-UE counts");

  // --- simulate ------------------------------------------------------------
  common_opts sim_opts;
  auto* sim = app.add_subcommand(
      "simulate", "run the experiment named by the config file's 'experiment' tag");
  add_common(sim, sim_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bp->parsed()) {
      json cfg = load_config(bp_opts, "beampattern");
      cfg["geometries"] = json::array({arch_json(bp_arch, bp_params)});
      cfg["beam_grid_step"] = bp_beam_step;
      return run_and_print(cfg, false);
    }
    if (ca->parsed()) {
      json cfg = load_config(ca_opts, "coarray");
      cfg["geometries"] = json::array({arch_json(ca_arch, ca_params)});
      return run_and_print(cfg, false);
    }
    if (loc->parsed()) {
      if (loc_opts.config_file.empty())
        throw CLI::ValidationError("localize", "--config <scenario.json> is required");
      std::ifstream in(loc_opts.config_file);
      if (!in)
        throw CLI::ValidationError("localize", "cannot open " + loc_opts.config_file);
      json scenario;
      in >> scenario;
      if (loc_opts.seed_set) scenario["seed"] = loc_opts.seed;
      if (loc_opts.snapshots > 0) scenario["snapshots"] = loc_opts.snapshots;
      char* out = nullptr;
      const silac_status st = silac_localize(
          scenario.dump().c_str(), loc_estimator.c_str(),
          loc_opts.grid_step > 0.0 ? loc_opts.grid_step : 1e-3,
          loc_opts.out_dir.empty() ? nullptr : loc_opts.out_dir.c_str(), &out);
      if (st != SILAC_OK) return fail("localize");
      std::cout << json::parse(out).dump(2) << "\n";
      silac_string_free(out);
      return 0;
    }
    if (snr->parsed()) {
      json cfg = load_config(snr_opts, "snr_compare");
      if (!snr_m.empty()) cfg["snr_m_list"] = snr_m;
      if (!snr_rho_db.empty()) cfg["snr_rho_db_list"] = snr_rho_db;
      if (snr_trials > 0) cfg["snr_trials"] = snr_trials;
      return run_and_print(cfg, false);
    }
    if (rate->parsed()) return run_and_print(load_config(rate_opts, "rate_sweep"), true);
    if (joint->parsed()) {
      json cfg = load_config(joint_opts, "joint_eval");
      cfg["m"] = joint_m;
      return run_and_print(cfg, true);
    }
    if (pareto->parsed()) {
      json cfg = load_config(pareto_opts, "joint_eval");
      cfg["m"] = pareto_m;
      return run_and_print(cfg, true);
    }
    if (cen->parsed()) {
      json cfg = load_config(cen_opts, "centric_sweep");
      cfg["m"] = cen_m;
      if (!cen_theta.empty()) cfg["theta_max_list"] = cen_theta;
      return run_and_print(cfg, true);
    }
    if (dof->parsed()) {
      json cfg = load_config(dof_opts, "dof");
      cfg["m"] = dof_m;
      if (!dof_lue.empty()) cfg["lue_counts"] = dof_lue;
      return run_and_print(cfg, true);
    }
    if (sim->parsed()) {
      if (sim_opts.config_file.empty())
        throw CLI::ValidationError("simulate", "--config <config.json> is required");
      json cfg = load_config(sim_opts, "");
      if (!cfg.contains("experiment"))
        throw CLI::ValidationError("simulate", "config has no 'experiment' tag");
      char* out = nullptr;
      const silac_status st = silac_run_experiment(cfg.dump().c_str(), &out);
      if (st != SILAC_OK) return fail("simulate");
      json result = json::parse(out);
      silac_string_free(out);
      std::cout << summary_line(result) << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
