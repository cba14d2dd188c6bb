// SPDX-License-Identifier: Apache-2.0
#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "core/beampattern.hpp"
#include "core/commlink.hpp"

namespace silac {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string normalize_tag(std::string tag) {
  std::replace(tag.begin(), tag.end(), '-', '_');
  if (tag == "pareto") tag = "joint_eval";
  if (tag == "coarray_report") tag = "coarray";
  return tag;
}

int default_kc(const std::string& experiment, int k) {
  if (experiment == "joint_eval" || experiment == "centric_sweep")
    return std::max(1, k - 8);
  if (experiment == "dof") return 2;
  return k;
}

channel_model channel_from_json(const nlohmann::json& j) {
  channel_model ch;
  const std::string model = j.value("model", "one_ring");
  if (model == "los") {
    ch.kind = channel_model::kind_t::los;
    ch.los_gain = j.value("gain", 1.0);
  } else if (model == "one_ring") {
    ch.kind = channel_model::kind_t::one_ring;
    ch.paths = j.value("paths", 10);
    ch.ring_radius_m = j.value("ring_radius_m", 5.0);
    ch.range_m = j.value("range_m", 40.0);
  } else {
    throw std::invalid_argument("unknown channel model: " + model);
  }
  return ch;
}

nlohmann::json channel_to_json(const channel_model& ch) {
  nlohmann::json j;
  if (ch.kind == channel_model::kind_t::los) {
    j["model"] = "los";
    j["gain"] = ch.los_gain;
  } else {
    j["model"] = "one_ring";
    j["paths"] = ch.paths;
    j["ring_radius_m"] = ch.ring_radius_m;
    j["range_m"] = ch.range_m;
  }
  return j;
}

int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

struct stats {
  double mean = 0.0, stddev = 0.0, median = 0.0;
};

stats summarize(const std::vector<double>& v) {
  stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(acc / (v.size() - 1)) : 0.0;
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  s.median = (n % 2 == 1) ? sorted[n / 2]
                          : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

/// Per-trial evaluation of every architecture on a common scenario.
/// One-ring path draws are shared across architectures within a trial so that
/// architecture comparisons use common random numbers; block noise/symbols get
/// an independent stream per (trial, architecture).
std::vector<config_record> evaluate_architectures(
    const experiment_config& cfg, const scenario& sc,
    const std::vector<arch_params>& archs, bool want_rmse, uint64_t salt) {
  const int n_arch = static_cast<int>(archs.size());
  const int k = static_cast<int>(sc.users.size());
  const int k_c = sc.comm_count();
  const int k_l = sc.loc_count();
  const uint64_t base = rng::derive(cfg.seed, salt);

  std::vector<array_geometry> geoms;
  std::vector<coarray> cas;
  for (const auto& a : archs) {
    geoms.push_back(build_geometry(a));
    if (want_rmse) cas.push_back(difference_coarray(geoms.back()));
  }
  const auto grid = want_rmse ? angle_grid(cfg.grid_step) : std::vector<double>{};
  const auto kind = estimator_from_string(cfg.estimator);
  std::vector<double> powers;
  for (const auto& u : sc.users) powers.push_back(u.power);
  const auto loc_truth = sc.loc_angles();

  std::vector<std::vector<trial_record>> slots(
      cfg.trials, std::vector<trial_record>(n_arch));

  parallel_for(cfg.trials, effective_threads(cfg.threads), [&](int t) {
    const uint64_t ts = trial_seed(base, static_cast<uint64_t>(t));
    rng path_rng(rng::derive(ts, 0));
    std::vector<std::optional<one_ring_paths>> draws(k);
    for (int u = 0; u < k; ++u)
      if (sc.users[u].channel.kind == channel_model::kind_t::one_ring)
        draws[u] = draw_one_ring_paths(sc.users[u].theta, sc.users[u].channel,
                                       path_rng);

    for (int a = 0; a < n_arch; ++a) {
      std::vector<cvec> channels(k);
      for (int u = 0; u < k; ++u)
        channels[u] = draws[u] ? assemble_one_ring(geoms[a], *draws[u])
                               : los_channel(geoms[a], sc.users[u].theta,
                                             sc.users[u].channel.los_gain);
      trial_record rec;
      rec.seed = ts;
      rec.sum_rate =
          k_c >= 1 ? sum_rate(channels, powers, sc.noise_power, k_c).sum_rate : 0.0;
      if (want_rmse && k_l >= 1) {
        rng block_rng(rng::derive(ts, 1000 + static_cast<uint64_t>(a)));
        cmat symbols(k, sc.snapshots);
        for (int u = 0; u < k; ++u)
          for (int n = 0; n < sc.snapshots; ++n) symbols(u, n) = block_rng.cnormal();
        const double sigma = std::sqrt(sc.noise_power);
        cmat noise(geoms[a].element_count(), sc.snapshots);
        for (int n = 0; n < sc.snapshots; ++n)
          for (int i = 0; i < geoms[a].element_count(); ++i)
            noise(i, n) = sigma * block_rng.cnormal();
        const auto block = assemble_block(sc, channels, std::move(symbols), noise);
        const cmat resid = localization_residual(block, sc);
        const cmat cov = sample_covariance(resid);
        const auto spec = coarray_spectrum(cov, cas[a], kind, k_l, grid);
        const auto peaks = find_peaks(spec, k_l);
        rec.rmse = score_rmse(loc_truth, peaks).rmse;
      }
      slots[t][a] = rec;
    }
  });

  std::vector<config_record> out(n_arch);
  for (int a = 0; a < n_arch; ++a) {
    out[a].arch = archs[a];
    std::vector<double> rates, rmses;
    for (int t = 0; t < cfg.trials; ++t) {
      out[a].trials.push_back(slots[t][a]);
      rates.push_back(slots[t][a].sum_rate);
      rmses.push_back(slots[t][a].rmse);
    }
    const auto rs = summarize(rates);
    out[a].rate_mean = rs.mean;
    out[a].rate_std = rs.stddev;
    const auto ms = summarize(rmses);
    out[a].rmse_mean = ms.mean;
    out[a].rmse_std = ms.stddev;
    out[a].rmse_median = ms.median;
  }
  return out;
}

nlohmann::json record_to_json(const config_record& r, bool with_trials = true) {
  nlohmann::json j = arch_to_json(r.arch);
  j["label"] = r.arch.label();
  j["m"] = r.arch.element_count();
  j["rate_mean"] = r.rate_mean;
  j["rate_std"] = r.rate_std;
  j["rmse_mean"] = r.rmse_mean;
  j["rmse_std"] = r.rmse_std;
  j["rmse_median"] = r.rmse_median;
  if (with_trials) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : r.trials)
      trials.push_back({{"seed", t.seed}, {"sum_rate", t.sum_rate}, {"rmse", t.rmse}});
    j["trials"] = trials;
  }
  return j;
}

}  // namespace

uint64_t trial_seed(uint64_t base, uint64_t trial) { return rng::derive(base, trial); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

scenario build_hotspot_scenario(int k, int k_c, double theta_max_deg,
                                double snr_db, int snapshots,
                                const channel_model& ch, double loc_power_scale) {
  if (k < 1 || k_c < 0 || k_c > k)
    throw std::invalid_argument("build_hotspot_scenario: need K >= 1, 0 <= K_c <= K");
  scenario sc;
  sc.snapshots = snapshots;
  sc.noise_power = 1.0;
  const double theta_max = deg2rad(theta_max_deg);
  const double power = db2lin(snr_db);
  for (int i = 0; i < k; ++i) {
    user_config u;
    u.theta = k == 1 ? 0.0 : -theta_max + 2.0 * theta_max * i / (k - 1);
    if (i < k_c) {
      u.role = user_role::comm;
      u.power = power;
      u.channel = ch;
    } else {
      u.role = user_role::loc;
      u.power = power * loc_power_scale;
      u.channel = channel_model{};  // LoS, unit gain
    }
    sc.users.push_back(u);
  }
  return sc;
}

std::vector<arch_params> enumerate_nested(int m) {
  std::vector<arch_params> out;
  for (int n1 = 1; n1 <= m - 1; ++n1)
    out.push_back(arch_params::make_nested(n1, m - n1));
  return out;
}

std::vector<arch_params> enumerate_coprime(int m) {
  std::vector<arch_params> out;
  for (int m1 = 1; 2 * m1 + m1 < m + 1; ++m1) {
    const int m2 = m + 1 - 2 * m1;
    if (m2 <= m1) break;
    if (std::gcd(m1, m2) != 1) continue;
    out.push_back(arch_params::make_coprime(m1, m2));
  }
  return out;
}

std::vector<size_t> pareto_front_indices(
    const std::vector<std::pair<double, double>>& pts) {
  if (pts.empty()) throw std::invalid_argument("pareto_front_indices: empty input");
  std::vector<size_t> keep;
  for (size_t i = 0; i < pts.size(); ++i) {
    bool drop = false;
    for (size_t j = 0; j < pts.size() && !drop; ++j) {
      if (j == i) continue;
      if (pts[j] == pts[i]) {
        if (j < i) drop = true;  // duplicates collapse to first occurrence
        continue;
      }
      const bool ge_rate = pts[j].first >= pts[i].first;
      const bool le_rmse = pts[j].second <= pts[i].second;
      const bool strict = pts[j].first > pts[i].first || pts[j].second < pts[i].second;
      if (ge_rate && le_rmse && strict) drop = true;
    }
    if (!drop) keep.push_back(i);
  }
  std::stable_sort(keep.begin(), keep.end(), [&](size_t a, size_t b) {
    return pts[a].first < pts[b].first;
  });
  return keep;
}

experiment_config experiment_config::from_json(const nlohmann::json& j) {
  experiment_config cfg;
  cfg.experiment = normalize_tag(j.value("experiment", std::string("rate_sweep")));
  if (j.contains("geometries"))
    for (const auto& g : j.at("geometries")) cfg.geometries.push_back(arch_from_json(g));
  const nlohmann::json sub = j.value("scenario", nlohmann::json::object());
  cfg.scenario.k = sub.value("k", 30);
  cfg.scenario.k_c = sub.value("k_c", default_kc(cfg.experiment, cfg.scenario.k));
  cfg.scenario.theta_max_deg =
      sub.value("theta_max_deg", cfg.experiment == "dof" ? 40.0 : 6.0);
  cfg.scenario.snr_db = sub.value("snr_db", 20.0);
  cfg.scenario.loc_power_scale = sub.value("loc_power_scale", 1.0);
  if (sub.contains("channel")) cfg.scenario.channel = channel_from_json(sub.at("channel"));
  cfg.trials = j.value("trials", 50);
  cfg.snapshots = j.value("snapshots", 200);
  cfg.seed = j.value("seed", static_cast<uint64_t>(1));
  cfg.grid_step = j.value("grid_step", 1e-3);
  cfg.beam_grid_step = j.value("beam_grid_step", 1e-3);
  cfg.threads = j.value("threads", 0);
  cfg.estimator = j.value("estimator", std::string("bartlett"));
  cfg.sweep_m = j.value("m", j.value("sweep_m", 16));
  if (j.contains("theta_max_list"))
    cfg.theta_max_list = j.at("theta_max_list").get<std::vector<double>>();
  if (j.contains("lue_counts"))
    cfg.lue_counts = j.at("lue_counts").get<std::vector<int>>();
  if (j.contains("snr_m_list"))
    cfg.snr_m_list = j.at("snr_m_list").get<std::vector<int>>();
  if (j.contains("snr_rho_db_list"))
    cfg.snr_rho_db_list = j.at("snr_rho_db_list").get<std::vector<double>>();
  cfg.snr_trials = j.value("snr_trials", static_cast<long long>(100000));
  cfg.full_scale = j.value("full_scale", false);
  cfg.out_dir = j.value("out", j.value("out_dir", std::string("results")));
  return cfg;
}

nlohmann::json experiment_config::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  nlohmann::json geoms = nlohmann::json::array();
  for (const auto& g : geometries) geoms.push_back(arch_to_json(g));
  j["geometries"] = geoms;
  j["scenario"] = {{"k", scenario.k},
                   {"k_c", scenario.k_c},
                   {"theta_max_deg", scenario.theta_max_deg},
                   {"snr_db", scenario.snr_db},
                   {"loc_power_scale", scenario.loc_power_scale},
                   {"channel", channel_to_json(scenario.channel)}};
  j["trials"] = trials;
  j["snapshots"] = snapshots;
  j["seed"] = seed;
  j["grid_step"] = grid_step;
  j["beam_grid_step"] = beam_grid_step;
  j["threads"] = threads;
  j["estimator"] = estimator;
  j["sweep_m"] = sweep_m;
  j["theta_max_list"] = theta_max_list;
  j["lue_counts"] = lue_counts;
  j["snr_m_list"] = snr_m_list;
  j["snr_rho_db_list"] = snr_rho_db_list;
  j["snr_trials"] = snr_trials;
  j["full_scale"] = full_scale;
  j["out_dir"] = out_dir;
  return j;
}

void experiment_config::resolve() {
  experiment = normalize_tag(experiment);
  if (full_scale) {
    trials = 500;
    snapshots = 1000;
  }
  if (theta_max_list.empty()) theta_max_list = {6.0, 15.0, 30.0, 45.0, 60.0};
  if (lue_counts.empty()) lue_counts = {4, 8, 12, 16, 20, 24};
  if (geometries.empty()) {
    if (experiment == "rate_sweep") {
      for (int n1 = 1; n1 <= 16; ++n1)
        geometries.push_back(arch_params::make_nested(n1, 8));
      for (int n2 : {1, 2, 4, 6, 10, 12, 14, 16})
        geometries.push_back(arch_params::make_nested(8, n2));
      for (int m1 : {2, 4, 5, 7, 8})
        geometries.push_back(arch_params::make_coprime(m1, 9));
      for (int m2 : {4, 5, 7, 8, 10, 11, 13, 14, 16})
        geometries.push_back(arch_params::make_coprime(3, m2));
      for (int m : {4, 8, 12, 16, 20, 24, 28, 32})
        geometries.push_back(arch_params::make_ula(m));
    } else if (experiment == "beampattern" || experiment == "coarray") {
      geometries = {arch_params::make_nested(8, 8), arch_params::make_coprime(5, 7),
                    arch_params::make_ula(16)};
    } else if (experiment == "dof") {
      geometries.push_back(arch_params::make_ula(sweep_m));
      const int half = sweep_m / 2;
      if (sweep_m - half >= 1 && half >= 1)
        geometries.push_back(arch_params::make_nested(half, sweep_m - half));
      const auto cps = enumerate_coprime(sweep_m);
      if (!cps.empty()) geometries.push_back(cps.back());
    }
  }
}

nlohmann::json experiment_result::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["version"] = version;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(record_to_json(r));
  j["records"] = recs;
  j["extra"] = extra;
  return j;
}

std::string config_hash(const nlohmann::json& j) {
  const std::string s = j.dump();
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

experiment_result make_result(const experiment_config& cfg) {
  experiment_result r;
  r.experiment = cfg.experiment;
  r.seed = cfg.seed;
  r.config_hash = config_hash(cfg.to_json());
  return r;
}

}  // namespace

experiment_result run_rate_sweep(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  const scenario sc = build_hotspot_scenario(
      cfg.scenario.k, cfg.scenario.k_c, cfg.scenario.theta_max_deg,
      cfg.scenario.snr_db, cfg.snapshots, cfg.scenario.channel,
      cfg.scenario.loc_power_scale);
  res.records = evaluate_architectures(cfg, sc, cfg.geometries,
                                       /*want_rmse=*/false, /*salt=*/0);
  std::ostringstream csv;
  csv << "label,m,rate_mean,rate_std\n";
  for (const auto& r : res.records)
    csv << r.arch.label() << ',' << r.arch.element_count() << ','
        << fmt(r.rate_mean) << ',' << fmt(r.rate_std) << '\n';
  res.csv = csv.str();
  return res;
}

experiment_result run_joint_eval(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  std::vector<arch_params> archs = enumerate_nested(cfg.sweep_m);
  const auto cps = enumerate_coprime(cfg.sweep_m);
  archs.insert(archs.end(), cps.begin(), cps.end());
  archs.push_back(arch_params::make_ula(cfg.sweep_m));

  const scenario sc = build_hotspot_scenario(
      cfg.scenario.k, cfg.scenario.k_c, cfg.scenario.theta_max_deg,
      cfg.scenario.snr_db, cfg.snapshots, cfg.scenario.channel,
      cfg.scenario.loc_power_scale);
  res.records = evaluate_architectures(cfg, sc, archs, /*want_rmse=*/true,
                                       /*salt=*/0);

  std::vector<std::pair<double, double>> pts;
  for (const auto& r : res.records) pts.push_back({r.rate_mean, r.rmse_mean});
  const auto front = pareto_front_indices(pts);
  std::vector<bool> on_front(pts.size(), false);
  nlohmann::json labels = nlohmann::json::array();
  for (size_t idx : front) {
    on_front[idx] = true;
    labels.push_back(res.records[idx].arch.label());
  }
  res.extra["m"] = cfg.sweep_m;
  res.extra["frontier_indices"] = front;
  res.extra["frontier_labels"] = labels;

  std::ostringstream csv;
  csv << "label,m,rate_mean,rate_std,rmse_mean,rmse_std,rmse_median,pareto\n";
  for (size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    csv << r.arch.label() << ',' << r.arch.element_count() << ','
        << fmt(r.rate_mean) << ',' << fmt(r.rate_std) << ',' << fmt(r.rmse_mean)
        << ',' << fmt(r.rmse_std) << ',' << fmt(r.rmse_median) << ','
        << (on_front[i] ? 1 : 0) << '\n';
  }
  res.csv = csv.str();
  return res;
}

experiment_result run_centric_sweep(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  std::vector<arch_params> archs = enumerate_nested(cfg.sweep_m);
  const size_t n_nested = archs.size();
  const auto cps = enumerate_coprime(cfg.sweep_m);
  archs.insert(archs.end(), cps.begin(), cps.end());
  archs.push_back(arch_params::make_ula(cfg.sweep_m));
  const size_t ula_idx = archs.size() - 1;

  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "theta_max_deg,family,mode,label,rate_mean,rmse_mean\n";
  for (size_t ti = 0; ti < cfg.theta_max_list.size(); ++ti) {
    const double theta_max = cfg.theta_max_list[ti];
    const scenario sc = build_hotspot_scenario(
        cfg.scenario.k, cfg.scenario.k_c, theta_max, cfg.scenario.snr_db,
        cfg.snapshots, cfg.scenario.channel, cfg.scenario.loc_power_scale);
    const auto recs = evaluate_architectures(cfg, sc, archs, /*want_rmse=*/true,
                                             /*salt=*/0x100 + ti);
    auto emit = [&](const std::string& family, const std::string& mode,
                    const config_record& r) {
      table.push_back({{"theta_max_deg", theta_max},
                       {"family", family},
                       {"mode", mode},
                       {"label", r.arch.label()},
                       {"rate_mean", r.rate_mean},
                       {"rmse_mean", r.rmse_mean}});
      csv << fmt(theta_max) << ',' << family << ',' << mode << ','
          << r.arch.label() << ',' << fmt(r.rate_mean) << ',' << fmt(r.rmse_mean)
          << '\n';
    };
    auto select = [&](size_t lo, size_t hi, bool comm_centric) {
      size_t best = lo;
      for (size_t i = lo; i < hi; ++i) {
        if (comm_centric ? recs[i].rate_mean > recs[best].rate_mean
                         : recs[i].rmse_mean < recs[best].rmse_mean)
          best = i;
      }
      return best;
    };
    emit("nested", "cc", recs[select(0, n_nested, true)]);
    emit("nested", "lc", recs[select(0, n_nested, false)]);
    if (!cps.empty()) {
      emit("coprime", "cc", recs[select(n_nested, ula_idx, true)]);
      emit("coprime", "lc", recs[select(n_nested, ula_idx, false)]);
    }
    emit("ula", "baseline", recs[ula_idx]);
  }
  res.extra["table"] = table;
  res.csv = csv.str();
  return res;
}

experiment_result run_dof(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "label,n_lue,rmse_mean,rmse_median,rate_mean\n";
  for (size_t li = 0; li < cfg.lue_counts.size(); ++li) {
    const int n_l = cfg.lue_counts[li];
    const scenario sc = build_hotspot_scenario(
        cfg.scenario.k_c + n_l, cfg.scenario.k_c, cfg.scenario.theta_max_deg,
        cfg.scenario.snr_db, cfg.snapshots, cfg.scenario.channel,
        cfg.scenario.loc_power_scale);
    auto recs = evaluate_architectures(cfg, sc, cfg.geometries,
                                       /*want_rmse=*/true, /*salt=*/0x200 + li);
    for (auto& r : recs) {
      table.push_back({{"label", r.arch.label()},
                       {"n_lue", n_l},
                       {"rmse_mean", r.rmse_mean},
                       {"rmse_median", r.rmse_median},
                       {"rate_mean", r.rate_mean}});
      csv << r.arch.label() << ',' << n_l << ',' << fmt(r.rmse_mean) << ','
          << fmt(r.rmse_median) << ',' << fmt(r.rate_mean) << '\n';
      res.records.push_back(std::move(r));
    }
  }
  res.extra["table"] = table;
  res.csv = csv.str();
  return res;
}

experiment_result run_snr_compare(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "m,rho_db,snr_phy_db,snr_vir_closed_db,snr_vir_mc_db\n";
  uint64_t row = 0;
  for (int m : cfg.snr_m_list) {
    for (double rho_db : cfg.snr_rho_db_list) {
      const double rho = db2lin(rho_db);
      const auto closed = virtual_snr_closed(m, rho);
      rng gen(rng::derive(cfg.seed, 0x300 + row));
      const auto mc =
          virtual_snr_mc(build_geometry(arch_params::make_ula(m)), rho,
                         cfg.snr_trials, gen);
      table.push_back({{"m", m},
                       {"rho_db", rho_db},
                       {"snr_phy_db", lin2db(closed.phy)},
                       {"snr_vir_closed_db", lin2db(closed.vir)},
                       {"snr_vir_mc_db", lin2db(mc.snr)}});
      csv << m << ',' << fmt(rho_db) << ',' << fmt(lin2db(closed.phy)) << ','
          << fmt(lin2db(closed.vir)) << ',' << fmt(lin2db(mc.snr)) << '\n';
      ++row;
    }
  }
  res.extra["table"] = table;
  res.csv = csv.str();
  return res;
}

namespace {

nlohmann::json metrics_block(const arch_params& arch, double grid_step,
                             const beam_metrics& bm) {
  nlohmann::json j = arch_to_json(arch);
  j["label"] = arch.label();
  j["m"] = arch.element_count();
  j["flmp"] = bm.flmp;
  j["bw"] = bm.bw;
  j["plmr"] = bm.plmr;
  j["plmr_db"] = lin2db(bm.plmr);
  nlohmann::json slh = nlohmann::json::array();
  for (const auto& s : bm.slh)
    slh.push_back({{"position", s.position},
                   {"height", s.height},
                   {"height_db", lin2db(s.height)}});
  j["slh"] = slh;
  const auto pb = plmr_bound(arch);
  j["plmr_bound"] = {{"value", pb.value}, {"winner", pb.winner}, {"terms", pb.terms}};
  const auto bounds = flmp_bounds(arch);
  j["bounds"] = {{"lower", bounds.lower},
                 {"upper", bounds.upper},
                 {"branch", to_string(bounds.branch)}};
  nlohmann::json th = nlohmann::json::object();
  if (!arch.ula_equivalent()) {
    const auto t = thresholds(arch);
    if (arch.kind == arch_kind::nested) {
      th["n_th"] = t.first;
      th["n_ap"] = t.second;
    } else {
      th["m_th1"] = t.first;
      th["m_th2"] = t.second;
    }
    const auto f = fnp_set(arch);
    nlohmann::json fnp = {{"delta1", f.delta1}, {"delta2", f.delta2}, {"delta3", f.delta3}};
    if (arch.kind == arch_kind::coprime) fnp["delta_a"] = f.delta_a;
    j["fnp"] = fnp;
  }
  j["thresholds"] = th;
  (void)grid_step;
  return j;
}

}  // namespace

experiment_result run_beampattern(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  nlohmann::json blocks = nlohmann::json::array();
  nlohmann::json files = nlohmann::json::array();
  std::ostringstream csv;
  csv << "label,delta,gain_linear,gain_db\n";
  for (const auto& arch : cfg.geometries) {
    const auto geom = build_geometry(arch);
    const auto bm = compute_metrics(geom);
    blocks.push_back(metrics_block(arch, cfg.beam_grid_step, bm));
    std::ostringstream one;
    one << "delta,gain_linear,gain_db\n";
    const long long n = static_cast<long long>(std::llround(2.0 / cfg.beam_grid_step));
    for (long long k = -n; k <= n; ++k) {
      const double d = k * cfg.beam_grid_step;
      const double g = gain(geom, d);
      const double gdb = lin2db(std::max(g, 1e-30));
      one << fmt(d) << ',' << fmt(g) << ',' << fmt(gdb) << '\n';
      csv << arch.label() << ',' << fmt(d) << ',' << fmt(g) << ',' << fmt(gdb) << '\n';
    }
    files.push_back({{"name", "beampattern_" + arch.label() + ".csv"},
                     {"content", one.str()}});
  }
  res.extra["metrics"] = blocks;
  res.extra["files"] = files;
  res.csv = csv.str();
  return res;
}

experiment_result run_coarray_report(const experiment_config& cfg) {
  experiment_result res = make_result(cfg);
  nlohmann::json blocks = nlohmann::json::array();
  std::ostringstream csv;
  csv << "label,lag,weight\n";
  for (const auto& arch : cfg.geometries) {
    const auto geom = build_geometry(arch);
    const auto ca = difference_coarray(geom);
    nlohmann::json b = coarray_to_json(ca);
    b["label"] = arch.label();
    blocks.push_back(b);
    for (size_t i = 0; i < ca.lags.size(); ++i)
      csv << arch.label() << ',' << ca.lags[i] << ',' << ca.weights[i] << '\n';
  }
  res.extra["coarrays"] = blocks;
  res.csv = csv.str();
  return res;
}

experiment_result run_experiment(const experiment_config& cfg_in) {
  experiment_config cfg = cfg_in;
  cfg.resolve();
  if (cfg.experiment == "rate_sweep") return run_rate_sweep(cfg);
  if (cfg.experiment == "joint_eval") return run_joint_eval(cfg);
  if (cfg.experiment == "centric_sweep") return run_centric_sweep(cfg);
  if (cfg.experiment == "dof") return run_dof(cfg);
  if (cfg.experiment == "snr_compare") return run_snr_compare(cfg);
  if (cfg.experiment == "beampattern") return run_beampattern(cfg);
  if (cfg.experiment == "coarray") return run_coarray_report(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

void write_outputs(const experiment_result& result, const experiment_config& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string header = "# version=" + result.version +
                             "\n# config_hash=" + result.config_hash +
                             "\n# seed=" + std::to_string(result.seed) + "\n";
  {
    nlohmann::json j = result.to_json();
    j["config"] = cfg.to_json();
    std::ofstream out(fs::path(cfg.out_dir) / (result.experiment + ".json"),
                      std::ios::binary);
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(cfg.out_dir) / (result.experiment + ".csv"),
                      std::ios::binary);
    out << header << result.csv;
  }
  if (result.extra.contains("files")) {
    for (const auto& f : result.extra.at("files")) {
      std::ofstream out(fs::path(cfg.out_dir) / f.at("name").get<std::string>(),
                        std::ios::binary);
      out << header << f.at("content").get<std::string>();
    }
  }
}

scenario scenario_from_json(const nlohmann::json& j, arch_params* arch_out,
                            uint64_t* seed_out) {
  if (arch_out) *arch_out = arch_from_json(j.at("geometry"));
  if (seed_out) *seed_out = j.value("seed", static_cast<uint64_t>(1));
  scenario sc;
  sc.snapshots = j.value("snapshots", 200);
  sc.noise_power = j.value("noise_power", 1.0);
  const double power = db2lin(j.value("snr_db", 20.0));
  std::vector<user_config> comm, loc;
  for (const auto& uj : j.at("users")) {
    user_config u;
    const std::string role = uj.value("role", "comm");
    u.role = role == "loc" ? user_role::loc : user_role::comm;
    u.theta = uj.contains("theta_deg") ? deg2rad(uj.at("theta_deg").get<double>())
                                       : uj.value("theta_rad", 0.0);
    u.power = power * uj.value("power_scale", 1.0);
    u.channel = uj.contains("channel") ? channel_from_json(uj.at("channel"))
                                       : channel_model{};
    (u.role == user_role::comm ? comm : loc).push_back(u);
  }
  sc.users = std::move(comm);
  sc.users.insert(sc.users.end(), loc.begin(), loc.end());
  if (sc.users.empty()) throw std::invalid_argument("scenario: no users");
  return sc;
}

nlohmann::json run_localize(const nlohmann::json& scenario_json,
                            const std::string& estimator, double grid_step,
                            const std::string& out_dir) {
  arch_params arch;
  uint64_t seed = 1;
  const scenario sc = scenario_from_json(scenario_json, &arch, &seed);
  const auto geom = build_geometry(arch);
  const int k_l = sc.loc_count();
  if (k_l < 1) throw std::invalid_argument("localize: scenario has no L-UEs");

  rng gen(seed);
  const auto block = generate_snapshots(sc, geom, gen);
  const cmat resid = localization_residual(block, sc);
  const cmat cov = sample_covariance(resid);
  const auto grid = angle_grid(grid_step);

  spectrum_result spec;
  const std::string est = estimator.empty() ? "bartlett" : estimator;
  if (est == "bartlett-physical") {
    spec = bartlett_spectrum(cov, physical_steering(geom), grid);
  } else {
    const auto ca = difference_coarray(geom);
    spec = coarray_spectrum(cov, ca, estimator_from_string(est), k_l, grid);
  }
  const auto peaks = find_peaks(spec, k_l);
  const auto report = score_rmse(sc.loc_angles(), peaks);

  nlohmann::json rj;
  rj["estimator"] = est;
  rj["grid_step"] = grid_step;
  rj["seed"] = seed;
  rj["geometry"] = geometry_to_json(geom);
  rj["rmse_rad"] = report.rmse;
  rj["resolved_count"] = report.resolved_count;
  rj["unstable"] = spec.unstable;
  nlohmann::json td = nlohmann::json::array(), ed = nlohmann::json::array();
  for (double t : report.truth) td.push_back(rad2deg(t));
  for (double e : report.estimates) ed.push_back(rad2deg(e));
  rj["true_deg"] = td;
  rj["estimated_deg"] = ed;
  rj["resolved"] = report.resolved;

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "theta_rad,value\n";
    for (size_t i = 0; i < spec.grid.size(); ++i)
      csv << fmt(spec.grid[i]) << ',' << fmt(spec.values[i]) << '\n';
    std::ofstream cf(fs::path(out_dir) / "localize_spectrum.csv", std::ios::binary);
    cf << csv.str();
    std::ofstream jf(fs::path(out_dir) / "localize_report.json", std::ios::binary);
    jf << rj.dump(2) << '\n';
  }
  return rj;
}

}  // namespace silac
