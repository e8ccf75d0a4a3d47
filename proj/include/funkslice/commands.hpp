#pragma once

// The pipelines behind the command-line driver. Each command reads and writes
// the files named in the configuration and throws funkslice errors; the
// driver maps those to exit codes.

#include "funkslice/config.hpp"
#include "funkslice/inversion.hpp"
#include "funkslice/io.hpp"
#include "funkslice/verify.hpp"

#include <string>

namespace funkslice {

/// Writes the phantom sampled on the sphere grid (or at the Radon-John
/// reconstruction points) with its symmetry residual in the header.
Json cmd_phantom(const ExperimentConfig& config);
/// Sweeps the configured transform and writes the profile.
SectionProfile cmd_forward(const ExperimentConfig& config);
/// Reconstructs from the stored profile, writes the reconstruction and the
/// metrics. Throws ConfigError when the profile does not match the
/// configuration and AccuracyError when the error exceeds the tolerance
/// (after writing both files).
Json cmd_invert(const ExperimentConfig& config);
/// Runs the identity suite and writes the report. Returns it; the caller
/// decides the exit code.
VerificationReport cmd_verify(const ExperimentConfig& config);
/// Renders whatever outputs exist: profile heatmap, reconstruction and error
/// maps (PPM) and the convergence curve (SVG). Returns the written paths.
std::vector<std::string> cmd_plot(const ExperimentConfig& config);

/// Throws ConfigError unless the profile was produced by this configuration
/// (transform, dimensions, center, lattice and quadrature).
void require_matching_profile(const SectionProfile& profile, const ExperimentConfig& config);

struct InversionOutcome {
  Json metrics;
  FieldFile field;     // sphere transforms
  PointSet points;     // Radon-John data
};
/// Reconstruction and metrics from an in-memory profile.
InversionOutcome invert_profile(const SectionProfile& profile, const ExperimentConfig& config);

Json report_to_json(const VerificationReport& report);

/// FNV-1a 64-bit digest, printed in hex; used to fingerprint file bodies.
std::string content_digest(const std::string& text);

}  // namespace funkslice
