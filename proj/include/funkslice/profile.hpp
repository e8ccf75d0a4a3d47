#pragma once

// Plane lattices, sampled transforms ("sinograms") and their interpolation.

#include "funkslice/forward.hpp"
#include "funkslice/parallel.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace funkslice {

inline constexpr const char* kCodeVersion = "funkslice 0.3.1";

enum class TransformKind { Funk, ParallelSlice, RadonJohn, FunkNormalized };

std::string to_string(TransformKind kind);
/// Accepts "funk", "slice", "radon", "funk-normalized"; throws ConfigError otherwise.
TransformKind parse_transform(const std::string& name);

/// Plane-parameter lattice.
///  - "angle_offset": normal direction at angle pi*i/angles in a fixed 2-plane
///    times offsets at Chebyshev nodes cos((j+1/2) pi/offsets). Available for
///    1-column normal frames with a 2-dimensional angular family: F and Pi on
///    S^2 (|a| > 1 for F) and lines in R^2.
///  - "random": `count` planes meeting the open ball, drawn from `seed`.
struct LatticeSpec {
  std::string kind = "angle_offset";
  int angles = 0;
  int offsets = 0;
  int count = 0;
  std::uint64_t seed = 0;

  bool operator==(const LatticeSpec&) const = default;
  std::size_t size() const;
};

/// Chebyshev offset node j of `count`.
double chebyshev_node(int j, int count);

struct SectionGrid {
  LatticeSpec lattice;
  SectionRule rule;
  BallSectionRule ball_rule;
};

/// Geometry of one lattice point: plane {x : normal' x = offset}.
struct LatticePlane {
  std::vector<int> index;
  Matrix normal;
  Vector offset;
};

/// `dim` is n for transforms on S^n and the ambient m for Radon-John data;
/// `section_dim` is k (plane dimension) for sphere transforms and d for Radon-John.
struct TransformSetup {
  TransformKind transform = TransformKind::Funk;
  int dim = 2;
  int section_dim = 2;
  Vector center;  // a; unused for Radon-John

  int ambient_dim() const;
  int normal_size() const;
};

std::vector<LatticePlane> enumerate_lattice(const TransformSetup& setup, const LatticeSpec& spec);

struct SectionProfile {
  TransformSetup setup;
  LatticeSpec lattice;
  SectionRule rule;
  BallSectionRule ball_rule;
  std::vector<double> values;
  std::vector<std::size_t> flagged;
  std::string code_version = kCodeVersion;
};

/// Evaluates the transform over the full lattice. Values are stored in
/// lattice order irrespective of `threads`; a plane whose evaluation throws
/// yields NaN and is listed in `flagged`.
SectionProfile profile_sweep(const TransformSetup& setup, const ScalarField& f,
                             const SectionGrid& grid, int threads = 1);

/// Single-plane evaluation of the transform named by `setup`.
double evaluate_transform(const TransformSetup& setup, const ScalarField& f,
                          const LatticePlane& plane, const SectionRule& rule,
                          const BallSectionRule& ball_rule);

/// Orthonormal basis (b1, b2) of the 2-plane in which angle_offset lattices
/// rotate: a-perp in R^3 for F and Pi, R^2 itself for lines.
Matrix lattice_rotation_plane(const TransformSetup& setup);

/// Bicubic interpolation of an angle_offset profile. The angle is periodic
/// with the identification (theta + pi, c) ~ (theta, -c); the offset is
/// interpolated in psi = arccos(c), where the samples are uniform, after
/// dividing out the section size (1 - c^2)^{e/2}. The quotient is even in psi,
/// so ghost nodes are mirrored.
class AngleOffsetInterpolant {
 public:
  explicit AngleOffsetInterpolant(const SectionProfile& profile);

  /// Value at angle theta and offset c; zero for |c| >= 1.
  double operator()(double theta, double c) const;
  /// The interpolated quotient value / (1 - c^2)^{e/2}; zero for |c| >= 1.
  double normalized(double theta, double c) const;
  const TransformSetup& setup() const { return setup_; }
  const Matrix& rotation_plane() const { return plane_; }

 private:
  double node(int i, int j) const;

  TransformSetup setup_;
  Matrix plane_;
  int angles_ = 0;
  int offsets_ = 0;
  int exponent_ = 0;
  std::vector<double> table_;  // (2*angles) x offsets, normalized
};

/// Data on planes through a (F_a profiles), keyed by the normal frame.
using CentralData = std::function<double(const StiefelFrame& normal)>;
/// Data on planes parallel to a (Pi_a profiles), keyed by frame in a-perp and offset.
using ParallelData = std::function<double(const Eigen::Ref<const Matrix>& normal,
                                          const Eigen::Ref<const Vector>& offset)>;

/// Interpolating views of angle_offset profiles.
CentralData central_data(const SectionProfile& profile);
ParallelData parallel_data(const SectionProfile& profile);

}  // namespace funkslice
