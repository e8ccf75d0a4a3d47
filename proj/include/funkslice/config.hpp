#pragma once

// Experiment description read from a single JSON document. Every numeric
// knob has a default; unknown keys are rejected so typos surface early.

#include "funkslice/fields.hpp"
#include "funkslice/io.hpp"
#include "funkslice/profile.hpp"
#include "funkslice/radon.hpp"
#include "funkslice/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace funkslice {

/// "gaussians" (explicit or random bumps through a symmetrizer), "constant"
/// (value everywhere; on the ball for Radon-John data) or "cap"
/// (sqrt(1 - |y|^2) on the ball).
struct PhantomConfig {
  std::string kind = "gaussians";
  std::vector<GaussianBump> bumps;
  int random_count = 0;
  std::uint64_t random_seed = 0;
  double value = 1.0;
  SymmetryClass symmetry = SymmetryClass::Generic;
};

struct OutputPaths {
  std::filesystem::path phantom;
  std::filesystem::path profile;
  std::filesystem::path reconstruction;
  std::filesystem::path metrics;
  std::filesystem::path report;
  std::filesystem::path plots;
};

struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::string scenario = "experiment";
  int n = 2;  // sphere dimension, or the ambient dimension m for Radon-John data
  int k = 2;  // section dimension, or the plane dimension d for Radon-John data
  std::optional<int> ell;
  Vector center;
  TransformKind transform = TransformKind::Funk;
  SectionGrid sections;
  PhantomConfig phantom;
  int grid_polar = 64;
  int grid_azimuth = 128;
  RadonInversionSpec inversion;
  /// Radon-John reconstructions: `points` seeded points in the ball of radius `points_radius`.
  int points = 25;
  double points_radius = 0.9;
  /// "profile" interpolates the stored sweep; "quadrature" recomputes plane
  /// integrals on demand (needed for m = 3).
  std::string radon_data = "profile";
  /// Extra resolution doublings reported by `invert` (0 = none).
  int convergence_levels = 0;
  double relative_l2_tolerance = 1e-2;
  double pointwise_tolerance = 1e-2;
  VerifySettings verify;
  std::uint64_t seed = 1;
  int threads = 1;
  OutputPaths outputs;

  bool sphere_transform() const { return transform != TransformKind::RadonJohn; }
  TransformSetup setup() const;
};

/// Parses and validates; relative paths resolve against `base_dir`. A seed
/// override replaces the top-level seed and every seed derived from it.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
/// Reads the file (IoError when unreadable, ConfigError when malformed).
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

/// The phantom of the configuration: a field on S^n, or on the unit ball of
/// R^m for Radon-John scenarios.
ScalarField phantom_field(const ExperimentConfig& config);
/// What an inversion of the configured data should return: the phantom for
/// F (W-even inputs) and Radon-John, its a-perp-even part for Pi.
ScalarField reconstruction_target(const ExperimentConfig& config);

SphereGrid config_grid(const ExperimentConfig& config);
/// Deterministic reconstruction points for Radon-John scenarios (columns).
Matrix radon_points(const ExperimentConfig& config);

/// JSON echo of the fields that determine a profile (stored as metadata).
Json describe_config(const ExperimentConfig& config);

}  // namespace funkslice
