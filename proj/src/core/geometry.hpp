// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/types.hpp"

namespace silac {

enum class arch_kind { ula, nested, coprime };

/// Architecture parameters on the half-wavelength grid (d0 = lambda/2).
///   ula:     p1 = M                                positions {0..M-1}
///   nested:  p1 = N1 (inner), p2 = N2 (outer)      inner spacing 1, outer N1+1
///   coprime: p1 = M1, p2 = M2, gcd = 1, M1 < M2    subarray sparsities M2 and M1
struct arch_params {
  arch_kind kind = arch_kind::ula;
  int p1 = 1;
  int p2 = 0;

  static arch_params make_ula(int m) { return {arch_kind::ula, m, 0}; }
  static arch_params make_nested(int n1, int n2) { return {arch_kind::nested, n1, n2}; }
  static arch_params make_coprime(int m1, int m2) { return {arch_kind::coprime, m1, m2}; }

  /// Total element count M: ULA -> M, nested -> N1+N2, co-prime -> 2*M1+M2-1.
  int element_count() const;

  /// True for parameter sets whose position set is a compact ULA:
  /// nested (0,M), (M,0), (M-1,1) and co-prime M1 = 1.
  bool ula_equivalent() const;

  std::string label() const;

  bool operator==(const arch_params&) const = default;
};

/// Throws std::invalid_argument when the parameter invariants are violated.
void validate(const arch_params& arch);

/// Integer antenna position set. Positions are exact grid indices so that
/// difference co-array arithmetic stays exact.
struct array_geometry {
  arch_params arch;
  std::vector<int> positions;  // strictly increasing, positions[0] == 0

  int element_count() const { return static_cast<int>(positions.size()); }
  int aperture() const { return positions.back(); }
};

array_geometry build_geometry(const arch_params& arch);

/// Steering vector a(theta), entry m = exp(j*pi*d_m*sin(theta)).
cvec steering_vector(const array_geometry& geom, double theta_rad);

nlohmann::json geometry_to_json(const array_geometry& geom);
arch_params arch_from_json(const nlohmann::json& j);
nlohmann::json arch_to_json(const arch_params& arch);

}  // namespace silac
