// SPDX-License-Identifier: Apache-2.0
#include "core/beampattern.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace silac {

namespace {

double sqr(double x) { return x * x; }

}  // namespace

double gain(const array_geometry& geom, double delta) {
  cdouble s = 0.0;
  for (int d : geom.positions) s += std::polar(1.0, kPi * d * delta);
  const double m = geom.element_count();
  return std::norm(s) / (m * m);
}

double dirichlet_ratio(double u, int n) {
  const double t = std::nearbyint(u / 2.0);
  const double v = u - 2.0 * t;  // exact: |v| <= 1 and 2t is representable
  const bool negate = (static_cast<long long>(t) & 1LL) != 0 && (n % 2 == 0);
  double mag;
  if (v == 0.0) {
    mag = n;
  } else {
    mag = std::sin(0.5 * kPi * n * v) / std::sin(0.5 * kPi * v);
  }
  return negate ? -mag : mag;
}

nested_terms_t nested_terms(int n1, int n2, double delta) {
  nested_terms_t t;
  t.f = dirichlet_ratio(delta, n1);
  t.g = dirichlet_ratio(static_cast<double>(n1 + 1) * delta, n2);
  t.phi = 0.5 * kPi * n2 * (n1 + 1) * delta;
  return t;
}

coprime_terms_t coprime_terms(int m1, int m2, double delta) {
  coprime_terms_t t;
  t.i1 = dirichlet_ratio(static_cast<double>(m2) * delta, 2 * m1);
  t.i2 = dirichlet_ratio(static_cast<double>(m1) * delta, m2 - 1);
  t.phi = 0.5 * kPi * (m1 - 1) * m2 * delta;
  return t;
}

double closed_form_gain(const arch_params& arch, double delta) {
  validate(arch);
  const double m = arch.element_count();
  switch (arch.kind) {
    case arch_kind::ula:
      return sqr(dirichlet_ratio(delta, arch.p1)) / (m * m);
    case arch_kind::nested: {
      const auto t = nested_terms(arch.p1, arch.p2, delta);
      return (t.f * t.f + t.g * t.g + 2.0 * t.f * t.g * std::cos(t.phi)) / (m * m);
    }
    case arch_kind::coprime: {
      const auto t = coprime_terms(arch.p1, arch.p2, delta);
      return (t.i1 * t.i1 + t.i2 * t.i2 + 2.0 * t.i1 * t.i2 * std::cos(t.phi)) /
             (m * m);
    }
  }
  return 0.0;
}

double flmp_search_step(const arch_params& arch) {
  double scale;
  switch (arch.kind) {
    case arch_kind::ula:
      scale = 2.0 / arch.p1;
      break;
    case arch_kind::nested:
      if (arch.ula_equivalent())
        scale = 2.0 / arch.element_count();
      else
        scale = 1.0 / (static_cast<double>(arch.p1 + 1) * arch.p2);  // delta3
      break;
    case arch_kind::coprime:
      if (arch.ula_equivalent())
        scale = 2.0 / arch.element_count();
      else
        scale = 1.0 / (static_cast<double>(arch.p1) * arch.p2);  // delta1
      break;
    default:
      scale = 1.0;
  }
  return std::min(1e-4, scale / 50.0);
}

namespace {

/// Ternary search for the minimizer of fn on [lo, hi], to width `tol`.
double refine_minimum(const std::function<double(double)>& fn, double lo,
                      double hi, double tol) {
  while (hi - lo > tol) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (fn(m1) < fn(m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

double refine_maximum(const std::function<double(double)>& fn, double lo,
                      double hi, double tol) {
  while (hi - lo > tol) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (fn(m1) > fn(m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

struct extremum {
  double position;
  double value;
};

/// Scans fn on the grid k*step, k = 1..floor(2/step), and reports strict local
/// extrema. Plateaus of exactly equal samples collapse to their midpoint.
/// `want_min` selects minima, otherwise maxima. Stops after the first hit when
/// `first_only`.
std::vector<extremum> scan_extrema(const std::function<double(double)>& fn,
                                   double step, bool want_min, bool first_only,
                                   double lo_delta = 0.0) {
  std::vector<extremum> found;
  const long long k0 = std::max(1LL, static_cast<long long>(std::ceil(lo_delta / step)) + 1);
  const long long klast = static_cast<long long>(std::floor(2.0 / step));
  auto better = [&](double a, double b) { return want_min ? a < b : a > b; };

  double prev = fn((k0 - 1) * step);
  long long k = k0;
  double cur = fn(k * step);
  while (k < klast) {
    if (better(cur, prev)) {
      // Walk any plateau of exactly equal samples.
      long long j = k;
      double nxt = fn((j + 1) * step);
      while (j + 1 < klast && nxt == cur) {
        ++j;
        nxt = fn((j + 1) * step);
      }
      if (better(cur, nxt)) {
        const double mid = 0.5 * (k + j) * step;
        const double bl = (k - 1) * step;
        const double bh = (j + 1) * step;
        const double refined = want_min ? refine_minimum(fn, bl, bh, 1e-9)
                                        : refine_maximum(fn, bl, bh, 1e-9);
        const double at = (refined > 0.0) ? refined : mid;
        found.push_back({at, fn(at)});
        if (first_only) return found;
        prev = cur;
        k = j + 1;
        cur = nxt;
        continue;
      }
      prev = cur;
      k = j + 1;
      cur = nxt;
      continue;
    }
    prev = cur;
    ++k;
    cur = fn(k * step);
  }
  return found;
}

}  // namespace

double find_flmp(const array_geometry& geom, double grid_step) {
  const double step = grid_step > 0.0 ? grid_step : flmp_search_step(geom.arch);
  auto fn = [&](double d) { return gain(geom, d); };
  const auto minima = scan_extrema(fn, step, /*want_min=*/true, /*first_only=*/true);
  if (minima.empty())
    throw std::runtime_error("find_flmp: no local minimum of the beam pattern in (0, 2]");
  return minima.front().position;
}

beam_metrics compute_metrics(const array_geometry& geom, double grid_step,
                             double slh_floor_db) {
  const double step = grid_step > 0.0 ? grid_step : flmp_search_step(geom.arch);
  beam_metrics m;
  m.flmp = find_flmp(geom, step);
  m.bw = 2.0 * m.flmp;
  const double g_min = gain(geom, m.flmp);
  m.plmr = 1.0 / std::max(g_min, std::numeric_limits<double>::min());

  const double floor_lin = db2lin(slh_floor_db);
  auto fn = [&](double d) { return gain(geom, d); };
  const auto maxima =
      scan_extrema(fn, step, /*want_min=*/false, /*first_only=*/false, m.flmp);
  for (const auto& e : maxima)
    if (e.value >= floor_lin && e.position < 2.0 - step)
      m.slh.push_back({e.position, std::min(e.value, 1.0)});
  std::sort(m.slh.begin(), m.slh.end(),
            [](const side_lobe& a, const side_lobe& b) { return a.height > b.height; });
  return m;
}

fnp_values fnp_set(const arch_params& arch) {
  validate(arch);
  fnp_values v;
  if (arch.kind == arch_kind::nested) {
    const int n1 = arch.p1, n2 = arch.p2;
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("fnp_set: nested requires N1 >= 1 and N2 >= 1");
    v.delta1 = 2.0 / n1;
    v.delta2 = 2.0 / (static_cast<double>(n1 + 1) * n2);
    v.delta3 = 1.0 / (static_cast<double>(n1 + 1) * n2);
    return v;
  }
  if (arch.kind == arch_kind::coprime) {
    const int m1 = arch.p1, m2 = arch.p2;
    if (m1 < 2)
      throw std::invalid_argument("fnp_set: coprime requires M1 >= 2");
    v.delta1 = 1.0 / (static_cast<double>(m1) * m2);
    v.delta2 = 2.0 / (static_cast<double>(m1) * (m2 - 1));
    v.delta3 = 1.0 / (static_cast<double>(m1 - 1) * m2);
    v.delta_a = 1.5 / (static_cast<double>(m1) * m2);
    return v;
  }
  throw std::invalid_argument("fnp_set: not defined for ULA");
}

namespace {

/// True when G of nested(n1, n2) decreases strictly over the whole first
/// phi period, phi in (0, pi] with phi = pi/2 * N2 * (N1+1) * delta.
/// Centered differences with phi step 1e-6 on a 1e-4 phi grid; a coarse
/// pre-pass over every 10th grid point bails out early on clear failures.
bool monotone_first_period(int n1, int n2) {
  const arch_params arch = arch_params::make_nested(n1, n2);
  const double to_delta = 2.0 / (kPi * n2 * (n1 + 1));
  const double h = 1e-6;
  auto deriv_negative = [&](double phi) {
    const double gp = closed_form_gain(arch, (phi + h) * to_delta);
    const double gm = closed_form_gain(arch, (phi - h) * to_delta);
    return gp - gm < 0.0;
  };
  const double fine = 1e-4;
  const long long n_fine = static_cast<long long>(std::floor(kPi / fine));
  for (long long i = 10; i <= n_fine; i += 10)
    if (!deriv_negative(i * fine)) return false;
  for (long long i = 1; i <= n_fine; ++i)
    if (!deriv_negative(i * fine)) return false;
  return deriv_negative(kPi);
}

/// True when G rises somewhere strictly inside (lo, hi): detects a local
/// minimum inside the interval given that G enters it decreasing.
bool rises_inside(const arch_params& arch, double lo, double hi, int samples = 2000) {
  double prev = closed_form_gain(arch, lo + (hi - lo) / (samples + 1));
  for (int i = 2; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples + 1);
    const double cur = closed_form_gain(arch, x);
    if (cur - prev > 1e-12 * std::max(1.0, prev)) return true;
    prev = cur;
  }
  return false;
}

}  // namespace

threshold_pair thresholds(const arch_params& arch, int scan_cap) {
  validate(arch);
  if (arch.kind == arch_kind::nested) {
    const int n1 = arch.p1;
    if (n1 < 1) throw std::invalid_argument("thresholds: nested requires N1 >= 1");
    threshold_pair th;
    th.second = static_cast<int>(std::floor(
        std::sqrt(10.0 * n1 * n1 / (n1 + 1.0)) + 1e-9));
    if (n1 < 7) {
      th.first = 1;
      return th;
    }
    th.first = 1;
    int n2 = 2;
    for (; n2 <= scan_cap; ++n2) {
      if (!monotone_first_period(n1, n2)) break;
      th.first = n2;
    }
    if (n2 > scan_cap)
      throw std::runtime_error("thresholds: n_th beyond scan cap");
    return th;
  }
  if (arch.kind == arch_kind::coprime) {
    const int m1 = arch.p1;
    if (m1 < 2) throw std::invalid_argument("thresholds: coprime requires M1 >= 2");
    threshold_pair th{m1, m1};
    bool case1 = m1 < 14;  // for M1 >= 14 the first branch is empty
    int m2 = m1 + 1;
    for (; m2 <= scan_cap; ++m2) {
      if (std::gcd(m1, m2) != 1) continue;
      const auto f = fnp_set(arch_params::make_coprime(m1, m2));
      if (case1) {
        if (rises_inside(arch_params::make_coprime(m1, m2), f.delta1, f.delta3)) {
          th.first = m2;
          th.second = m2;
          continue;
        }
        case1 = false;
      }
      if (rises_inside(arch_params::make_coprime(m1, m2), f.delta3, f.delta_a)) {
        th.second = m2;
        continue;
      }
      break;
    }
    if (m2 > scan_cap)
      throw std::runtime_error("thresholds: m_th beyond scan cap");
    return th;
  }
  throw std::invalid_argument("thresholds: not defined for ULA");
}

double delta_int_residual(int n1, int n2, double phi) {
  // g as a function of phi: g = sin(phi) / sin(phi / N2); f(0) = N1.
  const double g = std::sin(phi) / std::sin(phi / n2);
  return std::cos(phi) + g / (2.0 * n1);
}

double solve_delta_int(int n1, int n2) {
  if (n1 < 1 || n2 < 2)
    throw std::invalid_argument("solve_delta_int: requires N1 >= 1, N2 >= 2");
  double lo = 0.5 * kPi, hi = kPi;
  double flo = delta_int_residual(n1, n2, lo);
  double fhi = delta_int_residual(n1, n2, hi);
  if (!(flo > 0.0 && fhi < 0.0))
    throw std::runtime_error(
        "solve_delta_int: no sign change on [pi/2, pi]; branch premise violated");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = delta_int_residual(n1, n2, mid);
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double phi = 0.5 * (lo + hi);
  return 2.0 * phi / (kPi * n2 * (n1 + 1));
}

const char* to_string(bound_branch b) {
  switch (b) {
    case bound_branch::ula_degenerate:
      return "ula";
    case bound_branch::nested_small_outer:
      return "nested_small_outer";
    case bound_branch::nested_mid_outer:
      return "nested_mid_outer";
    case bound_branch::nested_large_outer:
      return "nested_large_outer";
    case bound_branch::coprime_narrow:
      return "coprime_narrow";
    case bound_branch::coprime_mid:
      return "coprime_mid";
    case bound_branch::coprime_wide:
      return "coprime_wide";
  }
  return "?";
}

bound_interval flmp_bounds(const arch_params& arch) {
  if (arch.kind == arch_kind::ula || arch.ula_equivalent()) {
    const double first_null = 2.0 / arch.element_count();
    return {first_null, first_null, bound_branch::ula_degenerate};
  }
  return flmp_bounds(arch, thresholds(arch));
}

bound_interval flmp_bounds(const arch_params& arch, const threshold_pair& th) {
  validate(arch);
  if (arch.kind == arch_kind::ula || arch.ula_equivalent()) {
    const double first_null = 2.0 / arch.element_count();
    return {first_null, first_null, bound_branch::ula_degenerate};
  }
  if (arch.kind == arch_kind::nested) {
    const int n1 = arch.p1, n2 = arch.p2;
    const double eta = n1 + 1.0;
    if (n2 <= th.first)
      return {2.0 * (n2 - 1) / (eta * n2), 2.0 / eta, bound_branch::nested_small_outer};
    if (n2 <= th.second)
      return {1.0 / (eta * n2), 2.0 / (eta * n2), bound_branch::nested_mid_outer};
    return {solve_delta_int(n1, n2), 2.0 / (eta * n2), bound_branch::nested_large_outer};
  }
  const int m1 = arch.p1, m2 = arch.p2;
  const auto f = fnp_set(arch);
  if (m2 <= th.first) return {f.delta1, f.delta3, bound_branch::coprime_narrow};
  if (m2 <= th.second) return {f.delta3, f.delta_a, bound_branch::coprime_mid};
  return {2.0 * f.delta1, f.delta2, bound_branch::coprime_wide};
}

plmr_bound_result plmr_bound(const arch_params& arch) {
  if (arch.kind == arch_kind::ula || arch.ula_equivalent())
    return {1.0, "ula", {{"ula", 1.0}}};
  return plmr_bound(arch, thresholds(arch));
}

plmr_bound_result plmr_bound(const arch_params& arch, const threshold_pair& th) {
  validate(arch);
  plmr_bound_result r;
  if (arch.kind == arch_kind::ula || arch.ula_equivalent()) {
    r.value = 1.0;
    r.winner = "ula";
    r.terms["ula"] = 1.0;
    return r;
  }
  const double m = arch.element_count();
  const double m2sq = m * m;
  if (arch.kind == arch_kind::nested) {
    const int n1 = arch.p1, n2 = arch.p2;
    const auto f = fnp_set(arch);
    if (n2 <= th.first) {
      const double f4 = nested_terms(n1, n2, (n2 - 1) * f.delta2).f;
      const double p4 = f4 * f4 / m2sq;
      const double f5 = nested_terms(n1, n2, n2 * f.delta2).f;
      const double p5 = (f5 * f5 + static_cast<double>(n2) * n2 - 2.0 * n2 * f5) / m2sq;
      r.terms["1/P4"] = 1.0 / p4;
      r.terms["1/P5"] = 1.0 / p5;
    } else if (n2 <= th.second) {
      const double f2 = nested_terms(n1, n2, f.delta2).f;
      const auto t3 = nested_terms(n1, n2, f.delta3);
      r.terms["1/P2"] = m2sq / (f2 * f2);
      r.terms["1/P3"] = m2sq / (t3.f * t3.f + t3.g * t3.g);
    } else {
      const double f2 = nested_terms(n1, n2, f.delta2).f;
      const double p_int = closed_form_gain(arch, solve_delta_int(n1, n2));
      r.terms["1/P2"] = m2sq / (f2 * f2);
      r.terms["1/Pint"] = 1.0 / p_int;
    }
  } else {
    const int m1 = arch.p1, m2v = arch.p2;
    const auto f = fnp_set(arch);
    if (m2v <= th.first) {
      const double i2 = coprime_terms(m1, m2v, f.delta1).i2;
      const auto t3 = coprime_terms(m1, m2v, f.delta3);
      r.terms["1/Q1"] = m2sq / (i2 * i2);
      r.terms["1/Q3"] = m2sq / (t3.i1 * t3.i1 + t3.i2 * t3.i2);
    } else if (m2v <= th.second) {
      const auto t3 = coprime_terms(m1, m2v, f.delta3);
      r.terms["1/Q3"] = m2sq / (t3.i1 * t3.i1 + t3.i2 * t3.i2);
    } else {
      const double i1 = coprime_terms(m1, m2v, f.delta2).i1;
      const double i2 = coprime_terms(m1, m2v, 2.0 * f.delta1).i2;
      r.terms["1/Q2"] = m2sq / (i1 * i1);
      r.terms["1/Q4"] = m2sq / (i2 * i2);
    }
  }
  r.value = 0.0;
  for (const auto& [label, val] : r.terms)
    if (val > r.value) {
      r.value = val;
      r.winner = label;
    }
  return r;
}

std::vector<side_lobe> slh_predict(const arch_params& arch) {
  validate(arch);
  std::vector<side_lobe> lobes;
  const double m = arch.element_count();
  if (arch.kind == arch_kind::nested) {
    const int n1 = arch.p1, n2 = arch.p2;
    if (n1 < 1 || n2 < 1)
      throw std::domain_error("slh_predict: degenerate nested parameters");
    const auto th = thresholds(arch);
    if (n2 < th.second)
      throw std::domain_error(
          "slh_predict: nested prediction requires N2 >= n_ap");
    const double height = sqr(n2 - 1.0) / (m * m);
    for (int n = -n1; n <= n1; ++n) {
      if (n == 0) continue;
      lobes.push_back({2.0 * n / (n1 + 1.0), height});
    }
  } else if (arch.kind == arch_kind::coprime) {
    const int m1 = arch.p1, m2 = arch.p2;
    if (m1 < 2)
      throw std::domain_error("slh_predict: coprime prediction requires M1 >= 2");
    const double h1 = 4.0 * m1 * m1 / (m * m);
    const double h2 = sqr(m2 - 1.0) / (m * m);
    for (int n = -(m2 - 1); n <= m2 - 1; ++n) {
      if (n == 0) continue;
      lobes.push_back({2.0 * n / m2, h1});
    }
    for (int n = -(m1 - 1); n <= m1 - 1; ++n) {
      if (n == 0) continue;
      lobes.push_back({2.0 * n / m1, h2});
    }
  } else {
    throw std::domain_error("slh_predict: not defined for ULA");
  }
  std::sort(lobes.begin(), lobes.end(),
            [](const side_lobe& a, const side_lobe& b) { return a.position < b.position; });
  for (size_t i = 1; i < lobes.size(); ++i)
    if (lobes[i].position == lobes[i - 1].position)
      throw std::logic_error("slh_predict: lobe sets overlap");
  return lobes;
}

}  // namespace silac
