// SPDX-License-Identifier: Apache-2.0
#include "silac/silac.h"

#include <cstring>
#include <stdexcept>
#include <string>

#include "core/beampattern.hpp"
#include "core/coarray.hpp"
#include "core/experiments.hpp"
#include "core/geometry.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/// Runs fn inside the C boundary: translates exceptions into status codes.
template <typename Fn>
silac_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SILAC_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return SILAC_ERR_INVALID_ARGUMENT;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return SILAC_ERR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return SILAC_ERR_INVALID_ARGUMENT;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return SILAC_ERR_NUMERIC;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SILAC_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return SILAC_ERR_INTERNAL;
  }
}

silac_status bad_arg(const char* msg) {
  set_error(msg);
  return SILAC_ERR_INVALID_ARGUMENT;
}

silac_status bad_handle() {
  set_error("null handle");
  return SILAC_ERR_INVALID_HANDLE;
}

}  // namespace

struct silac_geometry {
  silac::array_geometry geom;
};

struct silac_coarray {
  silac::coarray ca;
};

extern "C" {

const char* silac_version(void) { return silac::kToolVersion; }

const char* silac_last_error(void) { return g_last_error.c_str(); }

void silac_string_free(char* s) { delete[] s; }

silac_status silac_geometry_create(const char* arch, const int* params,
                                   size_t n_params, silac_geometry** out) {
  if (!arch || !params || !out) return bad_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string kind = arch;
    silac::arch_params p;
    if (kind == "ula") {
      if (n_params != 1) throw std::invalid_argument("ula expects 1 parameter");
      p = silac::arch_params::make_ula(params[0]);
    } else if (kind == "nested") {
      if (n_params != 2) throw std::invalid_argument("nested expects 2 parameters");
      p = silac::arch_params::make_nested(params[0], params[1]);
    } else if (kind == "coprime") {
      if (n_params != 2) throw std::invalid_argument("coprime expects 2 parameters");
      p = silac::arch_params::make_coprime(params[0], params[1]);
    } else {
      throw std::invalid_argument("unknown arch: " + kind);
    }
    *out = new silac_geometry{silac::build_geometry(p)};
  });
}

void silac_geometry_free(silac_geometry* g) { delete g; }

silac_status silac_geometry_element_count(const silac_geometry* g, int* out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  *out = g->geom.element_count();
  return SILAC_OK;
}

silac_status silac_geometry_aperture(const silac_geometry* g, int* out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  *out = g->geom.aperture();
  return SILAC_OK;
}

silac_status silac_geometry_positions(const silac_geometry* g, int* buffer,
                                      size_t capacity, size_t* out_count) {
  if (!g) return bad_handle();
  if (!buffer || !out_count) return bad_arg("null output");
  const auto& pos = g->geom.positions;
  *out_count = pos.size();
  if (capacity < pos.size()) return bad_arg("buffer too small");
  std::memcpy(buffer, pos.data(), pos.size() * sizeof(int));
  return SILAC_OK;
}

silac_status silac_geometry_json(const silac_geometry* g, char** out_json) {
  if (!g) return bad_handle();
  if (!out_json) return bad_arg("null output");
  return guarded([&] { *out_json = dup_string(silac::geometry_to_json(g->geom).dump()); });
}

silac_status silac_steering(const silac_geometry* g, double theta_rad,
                            double* interleaved, size_t capacity) {
  if (!g) return bad_handle();
  if (!interleaved) return bad_arg("null output");
  const size_t m = g->geom.positions.size();
  if (capacity < 2 * m) return bad_arg("buffer too small");
  const silac::cvec a = silac::steering_vector(g->geom, theta_rad);
  for (size_t i = 0; i < m; ++i) {
    interleaved[2 * i] = a(static_cast<Eigen::Index>(i)).real();
    interleaved[2 * i + 1] = a(static_cast<Eigen::Index>(i)).imag();
  }
  return SILAC_OK;
}

silac_status silac_gain(const silac_geometry* g, double delta, double* out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  *out = silac::gain(g->geom, delta);
  return SILAC_OK;
}

silac_status silac_closed_form_gain(const silac_geometry* g, double delta,
                                    double* out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  return guarded([&] { *out = silac::closed_form_gain(g->geom.arch, delta); });
}

silac_status silac_find_flmp(const silac_geometry* g, double grid_step,
                             double* out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  return guarded([&] { *out = silac::find_flmp(g->geom, grid_step); });
}

silac_status silac_beam_metrics_json(const silac_geometry* g, double grid_step,
                                     char** out_json) {
  if (!g) return bad_handle();
  if (!out_json) return bad_arg("null output");
  return guarded([&] {
    const auto bm = silac::compute_metrics(g->geom, grid_step);
    nlohmann::json j = silac::arch_to_json(g->geom.arch);
    j["flmp"] = bm.flmp;
    j["bw"] = bm.bw;
    j["plmr"] = bm.plmr;
    nlohmann::json slh = nlohmann::json::array();
    for (const auto& s : bm.slh)
      slh.push_back({{"position", s.position}, {"height", s.height}});
    j["slh"] = slh;
    const auto pb = silac::plmr_bound(g->geom.arch);
    j["plmr_bound"] = {{"value", pb.value}, {"winner", pb.winner}, {"terms", pb.terms}};
    const auto b = silac::flmp_bounds(g->geom.arch);
    j["bounds"] = {{"lower", b.lower}, {"upper", b.upper}, {"branch", silac::to_string(b.branch)}};
    nlohmann::json th = nlohmann::json::object();
    if (!g->geom.arch.ula_equivalent()) {
      const auto t = silac::thresholds(g->geom.arch);
      if (g->geom.arch.kind == silac::arch_kind::nested) {
        th["n_th"] = t.first;
        th["n_ap"] = t.second;
      } else {
        th["m_th1"] = t.first;
        th["m_th2"] = t.second;
      }
    }
    j["thresholds"] = th;
    *out_json = dup_string(j.dump());
  });
}

silac_status silac_coarray_create(const silac_geometry* g, silac_coarray** out) {
  if (!g) return bad_handle();
  if (!out) return bad_arg("null output");
  *out = nullptr;
  return guarded([&] { *out = new silac_coarray{silac::difference_coarray(g->geom)}; });
}

void silac_coarray_free(silac_coarray* c) { delete c; }

silac_status silac_coarray_sizes(const silac_coarray* c, int* m_vir, int* m_svir) {
  if (!c) return bad_handle();
  if (!m_vir || !m_svir) return bad_arg("null output");
  *m_vir = c->ca.m_vir();
  *m_svir = c->ca.m_svir();
  return SILAC_OK;
}

silac_status silac_coarray_json(const silac_coarray* c, char** out_json) {
  if (!c) return bad_handle();
  if (!out_json) return bad_arg("null output");
  return guarded([&] { *out_json = dup_string(silac::coarray_to_json(c->ca).dump()); });
}

silac_status silac_type1_pattern(const silac_coarray* c, double delta,
                                 int selected, double* out) {
  if (!c) return bad_handle();
  if (!out) return bad_arg("null output");
  return guarded([&] { *out = silac::type1_pattern(c->ca, delta, selected != 0); });
}

silac_status silac_type2_pattern(const silac_geometry* g, const silac_coarray* c,
                                 double delta_ki, double delta_kj, int selected,
                                 double* out) {
  if (!g || !c) return bad_handle();
  if (!out) return bad_arg("null output");
  return guarded([&] {
    *out = silac::type2_pattern(g->geom, c->ca, delta_ki, delta_kj, selected != 0);
  });
}

silac_status silac_virtual_snr_closed(int m, double rho, double* snr_vir,
                                      double* snr_phy) {
  if (!snr_vir || !snr_phy) return bad_arg("null output");
  return guarded([&] {
    const auto s = silac::virtual_snr_closed(m, rho);
    *snr_vir = s.vir;
    *snr_phy = s.phy;
  });
}

silac_status silac_virtual_snr_mc(const silac_geometry* g, double rho,
                                  long long trials, uint64_t seed,
                                  double* out_snr) {
  if (!g) return bad_handle();
  if (!out_snr) return bad_arg("null output");
  return guarded([&] {
    silac::rng gen(seed);
    *out_snr = silac::virtual_snr_mc(g->geom, rho, trials, gen).snr;
  });
}

silac_status silac_run_experiment(const char* config_json, char** out_json) {
  if (!config_json || !out_json) return bad_arg("null argument");
  return guarded([&] {
    auto cfg = silac::experiment_config::from_json(nlohmann::json::parse(config_json));
    cfg.resolve();
    const auto result = silac::run_experiment(cfg);
    silac::write_outputs(result, cfg);
    nlohmann::json j = result.to_json();
    j["config"] = cfg.to_json();
    *out_json = dup_string(j.dump());
  });
}

silac_status silac_localize(const char* scenario_json, const char* estimator,
                            double grid_step_rad, const char* out_dir,
                            char** out_report_json) {
  if (!scenario_json || !out_report_json) return bad_arg("null argument");
  return guarded([&] {
    const auto report = silac::run_localize(
        nlohmann::json::parse(scenario_json),
        estimator ? std::string(estimator) : std::string("bartlett"),
        grid_step_rad > 0.0 ? grid_step_rad : 1e-3,
        out_dir ? std::string(out_dir) : std::string());
    *out_report_json = dup_string(report.dump());
  });
}

}  // extern "C"
