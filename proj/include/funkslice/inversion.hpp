#pragma once

// Reconstruction of f from parallel slice data and from shifted Funk data.

#include "funkslice/fields.hpp"
#include "funkslice/profile.hpp"
#include "funkslice/radon.hpp"

#include <vector>

namespace funkslice {

/// Orthonormal basis of a-perp used as intrinsic coordinates: the leading n
/// columns of complete_frame(a / |a|). For n = 2 this is also the rotation
/// plane of angle_offset lattices.
Matrix slice_basis(const Vector& a);

/// Hyperplane data in intrinsic a-perp coordinates built from slice data:
/// Phi(omega, p) = (1 - p^2)^{-1/2} g(B omega, p). Slices must be hyperplanes
/// of R^{n+1} (k = n) so that their traces on a-perp are hyperplanes.
HyperplaneData slice_radon_data(const Vector& a, ParallelData g);
/// Same from an angle_offset Pi_a profile, reading the normalized interpolant directly.
HyperplaneData slice_radon_data(const SectionProfile& slice_profile);

struct SliceInversion {
  double value = 0.0;
  bool equator = false;  // |x.a~| < 1e-10: limit value 0 returned
  bool clamped = false;  // |Q_a x| pushed inside the disk before inversion
};

/// f_+(x) = |x.a~| / 2 (R^{-1} Phi)(Q_a x), with Phi from slice_radon_data.
SliceInversion slice_invert(const Vector& a, const HyperplaneData& phi, PointRef x,
                            const RadonInversionSpec& spec);
SliceInversion slice_invert(const Vector& a, const ParallelData& g, PointRef x,
                            const RadonInversionSpec& spec);

/// Hyperplane data for the slice inversion inside the F_a chain:
/// g_a(zeta) = g(phi_{a*} zeta) with the plane pulled back by parallel_to_central.
HyperplaneData funk_radon_data(const CenterContext& ctx, CentralData g);
/// Same from an angle_offset F_a profile without building frames per request.
HyperplaneData funk_radon_data(const CenterContext& ctx, const SectionProfile& funk_profile);

struct Reconstruction {
  GridField field;
  std::vector<std::size_t> flagged;   // grid indices whose inversion raised an error (NaN)
  std::vector<std::size_t> equator;   // grid indices resolved by the equator guard
  std::size_t clamped = 0;
};

/// Pi_a inversion on every grid point.
Reconstruction slice_invert_grid(const Vector& a, const HyperplaneData& phi, const SphereGrid& grid,
                                 const RadonInversionSpec& spec, int threads = 1);

/// f = M^{-1} Pi^{-1} g_a evaluated on the grid: for x on S^n, y = phi_{a*} x and
/// f(x) = s^{1-k} (1 - a*.y)^{k-1} (Pi^{-1} g_a)(y).
Reconstruction funk_invert(const CenterContext& ctx, const HyperplaneData& phi_a,
                           const SphereGrid& grid, const RadonInversionSpec& spec, int threads = 1);
Reconstruction funk_invert(const CenterContext& ctx, const SectionProfile& funk_profile,
                           const SphereGrid& grid, const RadonInversionSpec& spec, int threads = 1);

}  // namespace funkslice
