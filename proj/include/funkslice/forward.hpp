#pragma once

#include "funkslice/geometry.hpp"
#include "funkslice/mobius.hpp"
#include "funkslice/quadrature.hpp"

#include <cstdint>

namespace funkslice {

/// Affine d-plane tau(tau_0, u) in R^m: tau_0 spanned by an orthonormal
/// d-frame, shift u orthogonal to tau_0.
class EuclideanPlane {
 public:
  EuclideanPlane(StiefelFrame directions, Vector shift);

  const StiefelFrame& directions() const { return directions_; }
  const Vector& shift() const { return shift_; }
  int ambient_dim() const { return directions_.ambient_dim(); }
  int dim() const { return directions_.size(); }

 private:
  StiefelFrame directions_;
  Vector shift_;
};

/// Quadrature for plane sections of the unit ball. Chords and discs are
/// integrated in the angle beta with v = r sin(beta) w, which absorbs the
/// (1 - |y|^2)^{-1/2} endpoint behaviour of the integrands that arise from
/// sphere-to-ball reductions.
struct BallSectionRule {
  int angle_nodes = 64;
  SectionRule sphere;  // rule for the direction w on S^{d-1}, d >= 2

  bool operator==(const BallSectionRule&) const = default;
};

/// (F_a f)(tau): integral of f over S^n intersected with the plane through a.
/// Zero when the plane misses the open ball.
double funk_transform(const ScalarField& f, const CentralPlane& plane, const SectionRule& rule);

/// (Pi_a f)(zeta): integral of f over S^n intersected with a plane parallel to a.
double parallel_slice_transform(const ScalarField& f, const ParallelPlane& plane,
                                const SectionRule& rule);

/// (R phi)(tau): integral of phi over tau intersected with the unit ball of R^m.
double radon_john(const ScalarField& phi, const EuclideanPlane& plane,
                  const BallSectionRule& rule);

/// Normalized transform: mean of f over the section {x in S^n : xi'x = xi'a}
/// with respect to the probability measure, computed through the rotation
/// `rotation` (an orthogonal matrix whose trailing columns equal xi).
/// Zero when |xi'a| >= 1.
double funk_normalized(const ScalarField& f, const Matrix& rotation, int frame_size,
                       const Vector& a, const SectionRule& rule);
/// Same with the default rotation complete_frame(xi).
double funk_normalized(const ScalarField& f, const StiefelFrame& xi, const Vector& a,
                       const SectionRule& rule);

struct LinkEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int samples = 0;
  int empty_sections = 0;  // sampled k-planes that miss the open ball
};

/// Average of the normalized k-transform over frames [eta~, eta] with eta~
/// drawn from the invariant probability measure on St(eta-perp, l - k), where
/// l = n + 1 - eta.size(). Requires 1 < k < l <= n.
LinkEstimate dimension_link_rhs(const ScalarField& f, const StiefelFrame& eta, const Vector& a,
                                int k, int samples, std::uint64_t seed,
                                const SectionRule& rule);

/// The ball function attached to a slice, for y in a-perp (ambient coordinates):
/// phi(y) = (1-|y|^2)^{-1/2} (f(y + h a~) + f(y - h a~)), h = sqrt(1-|y|^2).
/// For f even across a-perp this is 2 (1-|y|^2)^{-1/2} f(y + h a~). Zero outside the open ball.
ScalarField slice_ball_function(const Vector& a, ScalarField f);

/// sqrt(1 - |u|^2) (R phi)(a-perp intersected with zeta), the Radon-John side
/// of the slice reduction.
double slice_reduction_rhs(const ScalarField& f, const ParallelPlane& plane,
                           const BallSectionRule& rule);

}  // namespace funkslice
