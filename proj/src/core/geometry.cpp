// SPDX-License-Identifier: Apache-2.0
#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace silac {

int arch_params::element_count() const {
  switch (kind) {
    case arch_kind::ula:
      return p1;
    case arch_kind::nested:
      return p1 + p2;
    case arch_kind::coprime:
      return 2 * p1 + p2 - 1;
  }
  return 0;
}

bool arch_params::ula_equivalent() const {
  switch (kind) {
    case arch_kind::ula:
      return true;
    case arch_kind::nested:
      return p1 == 0 || p2 == 0 || p2 == 1;
    case arch_kind::coprime:
      return p1 == 1;
  }
  return false;
}

std::string arch_params::label() const {
  switch (kind) {
    case arch_kind::ula:
      return "ula(" + std::to_string(p1) + ")";
    case arch_kind::nested:
      return "nested(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
    case arch_kind::coprime:
      return "coprime(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
  }
  return "?";
}

void validate(const arch_params& arch) {
  switch (arch.kind) {
    case arch_kind::ula:
      if (arch.p1 < 1) throw std::invalid_argument("ula: M must be >= 1");
      return;
    case arch_kind::nested:
      if (arch.p1 < 0 || arch.p2 < 0)
        throw std::invalid_argument("nested: N1, N2 must be non-negative");
      if (arch.p1 + arch.p2 < 1)
        throw std::invalid_argument("nested: N1 + N2 must be >= 1");
      return;
    case arch_kind::coprime:
      if (arch.p1 < 1) throw std::invalid_argument("coprime: M1 must be >= 1");
      if (arch.p1 >= arch.p2)
        throw std::invalid_argument("coprime: M1 < M2 required");
      if (std::gcd(arch.p1, arch.p2) != 1)
        throw std::invalid_argument("coprime: gcd(M1, M2) must be 1");
      return;
  }
  throw std::invalid_argument("unknown architecture");
}

array_geometry build_geometry(const arch_params& arch) {
  validate(arch);
  std::set<int> pos;
  switch (arch.kind) {
    case arch_kind::ula:
      for (int m = 0; m < arch.p1; ++m) pos.insert(m);
      break;
    case arch_kind::nested: {
      const int n1 = arch.p1, n2 = arch.p2;
      for (int m = 0; m < n1; ++m) pos.insert(m);
      // Outer subarray {N1, 2N1+1, ..., N1*N2+N2-1}, spacing N1+1.
      for (int k = 0; k < n2; ++k) pos.insert(n1 + k * (n1 + 1));
      break;
    }
    case arch_kind::coprime: {
      const int m1 = arch.p1, m2 = arch.p2;
      for (int k = 0; k < 2 * m1; ++k) pos.insert(k * m2);
      for (int k = 1; k < m2; ++k) pos.insert(k * m1);
      break;
    }
  }
  array_geometry geom{arch, std::vector<int>(pos.begin(), pos.end())};
  if (geom.element_count() != arch.element_count())
    throw std::logic_error("geometry construction lost elements");
  return geom;
}

cvec steering_vector(const array_geometry& geom, double theta_rad) {
  const double s = std::sin(theta_rad);
  cvec a(geom.element_count());
  for (int m = 0; m < geom.element_count(); ++m)
    a(m) = std::polar(1.0, kPi * geom.positions[m] * s);
  return a;
}

nlohmann::json arch_to_json(const arch_params& arch) {
  nlohmann::json j;
  switch (arch.kind) {
    case arch_kind::ula:
      j["arch"] = "ula";
      j["params"] = {arch.p1};
      break;
    case arch_kind::nested:
      j["arch"] = "nested";
      j["params"] = {arch.p1, arch.p2};
      break;
    case arch_kind::coprime:
      j["arch"] = "coprime";
      j["params"] = {arch.p1, arch.p2};
      break;
  }
  return j;
}

arch_params arch_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("arch").get<std::string>();
  const auto params = j.at("params").get<std::vector<int>>();
  arch_params arch;
  if (kind == "ula") {
    if (params.size() != 1) throw std::invalid_argument("ula expects 1 parameter");
    arch = arch_params::make_ula(params[0]);
  } else if (kind == "nested") {
    if (params.size() != 2) throw std::invalid_argument("nested expects 2 parameters");
    arch = arch_params::make_nested(params[0], params[1]);
  } else if (kind == "coprime") {
    if (params.size() != 2) throw std::invalid_argument("coprime expects 2 parameters");
    arch = arch_params::make_coprime(params[0], params[1]);
  } else {
    throw std::invalid_argument("unknown arch: " + kind);
  }
  validate(arch);
  return arch;
}

nlohmann::json geometry_to_json(const array_geometry& geom) {
  nlohmann::json j = arch_to_json(geom.arch);
  j["positions"] = geom.positions;
  return j;
}

}  // namespace silac
