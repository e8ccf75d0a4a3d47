#pragma once

// Dual means over hyperplanes and the Radon-John inversion through the
// Erdelyi-Kober fractional derivative.

#include "funkslice/forward.hpp"
#include "funkslice/fractional.hpp"
#include "funkslice/profile.hpp"

#include <functional>
#include <vector>

namespace funkslice {

/// Data on hyperplanes {y in R^m : omega.y = p}, |omega| = 1. Must satisfy
/// Phi(-omega, -p) = Phi(omega, p).
using HyperplaneData = std::function<double(PointRef omega, double p)>;

/// Interpolating view of a Radon-John profile of lines in R^2 (angle_offset lattice).
HyperplaneData hyperplane_data(const SectionProfile& radon_profile);
/// Exact-by-quadrature data: every request runs radon_john on phi.
HyperplaneData hyperplane_data(ScalarField phi, int m, const BallSectionRule& rule);

/// (R*_x Phi)(t): mean of Phi over hyperplanes at distance t from x, for
/// m = 2 (angle average) and m = 3 (polar Gauss-Legendre x azimuth). Planes
/// missing the unit ball carry no mass; the support boundary is resolved by
/// cosine grading. `angular_nodes` is the node count per angle.
double dual_mean(const HyperplaneData& data, const Vector& x, double t, int angular_nodes);

/// Dual mean of a brute-force average over `directions` equally spaced line
/// directions (m = 2 only). Reference for tests.
double dual_mean_uniform(const HyperplaneData& data, const Vector& x, double t, int directions);

struct RadonInversionSpec {
  FractionalOpSpec op;
  int radial_nodes = 40;     // per radial segment
  int angular_nodes = 96;
  double t_min = 0.02;       // smallest extrapolation node, shrunk near the boundary
  int t_levels = 4;          // t_min * 2^j, j < t_levels
  double fit_tolerance = 1e-3;
  double boundary_clamp = 1e-6;

  bool operator==(const RadonInversionSpec&) const = default;
};

struct RadonInversion {
  double value = 0.0;
  double fit_residual = 0.0;
  bool clamped = false;
  std::vector<double> t;
  std::vector<double> samples;  // pi^{-d/2} D^{d/2} R*_x Phi at t
};

/// phi(x) from Phi = R phi (hyperplanes, d = m - 1 in {1, 2}). The limit t -> 0
/// is taken by a least-squares quadratic in t^2 through the samples. Throws
/// AccuracyError when the fit residual exceeds fit_tolerance * (1 + |value|).
RadonInversion radon_invert(const HyperplaneData& data, const Vector& x,
                            const RadonInversionSpec& spec);

/// The radial profile t -> R*_x Phi(t) on [0, 1 - |x|] and [1 - |x|, 1 + |x|].
RadialProfile dual_mean_profile(const HyperplaneData& data, const Vector& x, int radial_nodes,
                                int angular_nodes);

}  // namespace funkslice
