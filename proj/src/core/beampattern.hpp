// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace silac {

// All beam-pattern quantities live on the spatial-angle axis
// delta = sin(theta_k) - sin(theta_i), delta in [-2, 2].

/// Normalized beam pattern G(delta) = |sum_m exp(j*pi*d_m*delta)|^2 / M^2,
/// evaluated by direct summation over the position set.
double gain(const array_geometry& geom, double delta);

/// sin(n*pi*u/2) / sin(pi*u/2) with removable singularities at even integer u
/// evaluated by their limit (+-n). Reduction u -> u - 2*round(u/2) is exact in
/// floating point, which keeps the ratio accurate arbitrarily close to poles.
double dirichlet_ratio(double u, int n);

/// Decomposition terms of the nested-array closed form:
/// G = (f^2 + g^2 + 2*f*g*cos(phi)) / M^2.
struct nested_terms_t {
  double f;    // inner subarray kernel, f(0) = N1
  double g;    // outer subarray kernel, g(0) = N2
  double phi;  // pi/2 * N2 * (N1+1) * delta
};
nested_terms_t nested_terms(int n1, int n2, double delta);

/// Decomposition terms of the co-prime closed form:
/// G = (i1^2 + i2^2 + 2*i1*i2*cos(phi)) / M^2.
struct coprime_terms_t {
  double i1;   // subarray-1 kernel (2*M1 elements, sparsity M2), i1(0) = 2*M1
  double i2;   // subarray-2 kernel (M2-1 elements, sparsity M1), i2(0) = M2-1
  double phi;  // pi/2 * (M1-1) * M2 * delta
};
coprime_terms_t coprime_terms(int m1, int m2, double delta);

/// Closed-form beam pattern; agrees with gain(build_geometry(arch), delta)
/// to numerical precision for every architecture, including degenerate ones.
double closed_form_gain(const arch_params& arch, double delta);

/// Coarse search step used by find_flmp: min(1e-4, s/50) where s is the
/// narrowest first-null scale of the architecture.
double flmp_search_step(const arch_params& arch);

/// First local minimum point of gain() on (0, 2]: coarse scan with strict
/// local-minimum test (plateaus collapse to their midpoint), then ternary
/// refinement to 1e-9. Throws std::runtime_error when no minimum exists
/// (only possible for M = 1).
double find_flmp(const array_geometry& geom, double grid_step = 0.0);

struct side_lobe {
  double position;  // delta > 0
  double height;    // linear gain in (0, 1]
};

struct beam_metrics {
  double flmp = 0.0;
  double bw = 0.0;    // 2 * flmp
  double plmr = 0.0;  // 1 / G(flmp)
  std::vector<side_lobe> slh;  // local maxima on (flmp, 2), tallest first
};

/// flmp/bw/plmr plus all side lobes above `slh_floor_db` (default -30 dB).
beam_metrics compute_metrics(const array_geometry& geom, double grid_step = 0.0,
                             double slh_floor_db = -30.0);

/// First-null points of the closed-form decomposition terms.
/// nested:  delta1 = 2/N1, delta2 = 2/((N1+1)N2), delta3 = 1/((N1+1)N2)
/// coprime: delta1 = 1/(M1M2), delta2 = 2/(M1(M2-1)),
///          delta3 = 1/((M1-1)M2), delta_a ~= 3/(2M1M2)
struct fnp_values {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double delta_a = 0.0;  // co-prime only; 0 for nested
};
fnp_values fnp_set(const arch_params& arch);

/// nested: {n_th, n_ap}; co-prime: {m_th1, m_th2}. Determined by numerical
/// exhaustive scan (n_th: monotone decrease of G over the first phi period;
/// m_th: location of the first local minimum relative to the FNPs), except
/// n_th = 1 for N1 < 7, n_ap = floor(sqrt(10*N1^2/(N1+1))) and
/// m_th1 = M1 for M1 >= 14.
struct threshold_pair {
  int first = 0;   // n_th / m_th1
  int second = 0;  // n_ap / m_th2
};
threshold_pair thresholds(const arch_params& arch, int scan_cap = 512);

/// Root of cos(phi) + g(phi)/(2*f(0)) = 0 on phi in [pi/2, pi], mapped back to
/// delta_int = 2*phi / (pi*N2*(N1+1)). Bisection to 1e-10; throws when the
/// bracket carries no sign change.
double solve_delta_int(int n1, int n2);
/// Residual of the delta_int equation at a given phi (for verification).
double delta_int_residual(int n1, int n2, double phi);

enum class bound_branch {
  ula_degenerate,
  nested_small_outer,  // 2 <= N2 <= n_th
  nested_mid_outer,    // n_th < N2 <= n_ap
  nested_large_outer,  // N2 > n_ap
  coprime_narrow,      // M1 < M2 <= m_th1
  coprime_mid,         // m_th1 < M2 <= m_th2
  coprime_wide,        // M2 > m_th2
};
const char* to_string(bound_branch b);

struct bound_interval {
  double lower = 0.0;
  double upper = 0.0;
  bound_branch branch = bound_branch::ula_degenerate;
};

/// Branch-selected FLMP interval. ULA-equivalent parameter sets return the
/// exact Dirichlet first null [2/M, 2/M].
bound_interval flmp_bounds(const arch_params& arch);
bound_interval flmp_bounds(const arch_params& arch, const threshold_pair& th);

struct plmr_bound_result {
  double value = 1.0;
  std::string winner;                    // label of the active term
  std::map<std::string, double> terms;   // all branch terms, label -> 1/P
};

/// Branch-selected PLMR lower bound (max over the branch terms 1/P_i resp.
/// 1/Q_i). ULA-equivalent parameter sets return the trivial bound 1.
plmr_bound_result plmr_bound(const arch_params& arch);
plmr_bound_result plmr_bound(const arch_params& arch, const threshold_pair& th);

/// Predicted grating-lobe positions/heights.
/// nested (requires N2 >= n_ap): delta = 2n/(N1+1), n = +-1..+-N1,
///   height (N2-1)^2/M^2.
/// co-prime (requires M1 >= 2): S1 = 2n/M2 with height 4*M1^2/M^2 and
///   S2 = 2n/M1 with height (M2-1)^2/M^2; the two sets never overlap.
/// Sorted by position. Throws std::domain_error outside the stated regime.
std::vector<side_lobe> slh_predict(const arch_params& arch);

}  // namespace silac
