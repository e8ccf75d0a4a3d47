#pragma once

// Numerical certification of the structural identities: each check samples
// the identity, reports its worst residual and compares with a tolerance.

#include "funkslice/fields.hpp"
#include "funkslice/forward.hpp"
#include "funkslice/profile.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace funkslice {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double runtime_seconds = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

/// Sample sizes and resolutions of the suite. Defaults reproduce the
/// acceptance setting.
struct VerifySettings {
  std::uint64_t seed = 20240611;
  Vector center = Vector::Unit(3, 2) * 2.0;  // n = 2, |a| = 2

  int mobius_points = 10000;
  int bijection_planes = 1000;
  std::vector<double> bijection_radii{1.5, 2.0, 5.0};
  int conjugation_points = 10000;
  int factorization_planes = 200;
  int factorization_nodes = 512;
  double map_perturbation = 0.0;  // mutation of phi_{a*} inside the factorization check
  LatticeSpec kernel_lattice{"angle_offset", 48, 24, 0, 0};
  LatticeSpec reduction_lattice{"angle_offset", 64, 64, 0, 0};
  int measure_polar = 100;
  int measure_azimuth = 100;
  int determinant_samples = 1000;
  int link_frames = 20;
  int link_samples = 10000;
  int link_n = 3;
  int link_k = 2;
  int link_ell = 3;
  double link_floor = 1e-3;
  int phantom_bumps = 3;

  /// Overrides of the default tolerance per check name.
  std::map<std::string, double> tolerances;
  /// Checks to run, in order; empty runs all of them.
  std::vector<std::string> checks;
};

/// Names of all checks in their default order.
const std::vector<std::string>& verify_check_names();
double default_tolerance(const std::string& check);

/// Runs one check by name (ConfigError for unknown names).
CheckResult run_check(const std::string& name, const VerifySettings& settings);
/// Runs the configured checks; every name appears once in the report.
VerificationReport run_verification(const VerifySettings& settings);

/// Fixed points phi_b(0) = b, phi_b(b) = 0 and the sphere identity.
CheckResult check_mobius_identities(const VerifySettings& s);
/// phi_b(phi_b x) = x; separate because its residual carries the conditioning
/// of the map, up to (1 - x.b)^2 / (1 - |b|^2) times the rounding unit.
CheckResult check_mobius_involution(const VerifySettings& s);
CheckResult check_plane_bijection(const VerifySettings& s);
CheckResult check_conjugation(const VerifySettings& s);
CheckResult check_involution(const VerifySettings& s);
CheckResult check_factorization(const VerifySettings& s);
CheckResult check_kernels(const VerifySettings& s);
CheckResult check_slice_reduction(const VerifySettings& s);
CheckResult check_measure_change(const VerifySettings& s);
CheckResult check_determinant(const VerifySettings& s);
/// Residual is the worst |lhs - rhs| / max(floor, 3 sigma_MC) over frames; tolerance 1.
CheckResult check_dimension_link(const VerifySettings& s);

}  // namespace funkslice
