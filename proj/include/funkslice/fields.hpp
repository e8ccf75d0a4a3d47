#pragma once

// Grid-backed fields on S^n and the Gaussian phantom family.

#include "funkslice/geometry.hpp"
#include "funkslice/mobius.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace funkslice {

/// Cell-centred hyperspherical grid on S^n: `polar` cells in each of the
/// n - 1 polar angles and `azimuth` (even) nodes in the azimuth. Points are
/// x_{n+1} = cos t1, x_n = sin t1 cos t2, ..., (x_1, x_2) = prod(sin) (cos p, sin p).
/// Index order: first polar angle slowest, azimuth fastest.
class SphereGrid {
 public:
  SphereGrid() = default;
  SphereGrid(int n, int polar, int azimuth);

  int dim() const { return n_; }
  int polar() const { return polar_; }
  int azimuth() const { return azimuth_; }
  std::size_t size() const { return size_; }

  std::vector<int> multi_index(std::size_t index) const;
  std::vector<double> angles(std::size_t index) const;
  Vector point(std::size_t index) const;
  /// Midpoint-rule surface weight of the cell.
  double weight(std::size_t index) const;

  /// Multilinear interpolation in the angles; cells next to a pole use ghost
  /// nodes reflected through the pole.
  double interpolate(const std::vector<double>& values, PointRef x) const;

  bool operator==(const SphereGrid&) const = default;

 private:
  std::size_t flat(const std::vector<int>& idx) const;
  double node_value(const std::vector<double>& values, std::vector<int> idx) const;

  int n_ = 2;
  int polar_ = 0;
  int azimuth_ = 0;
  std::size_t size_ = 0;
};

Vector sphere_point_from_angles(const std::vector<double>& angles);
std::vector<double> angles_from_sphere_point(PointRef x);

struct GridField {
  SphereGrid grid;
  std::vector<double> values;

  double operator()(PointRef x) const { return grid.interpolate(values, x); }
  ScalarField as_field() const;
};

/// Samples f at every grid point (data-parallel).
GridField sample_field(const SphereGrid& grid, const ScalarField& f, int threads = 1);

struct FieldError {
  double relative_l2 = 0.0;
  double linf = 0.0;
};

/// Errors of `values` against `truth` on the grid (surface-weighted L2).
FieldError field_error(const SphereGrid& grid, const std::vector<double>& values,
                       const std::vector<double>& truth);

struct GaussianBump {
  Vector center;  // used as given: unit vectors for sphere phantoms, ball points for Radon data
  double width = 0.3;
  double amplitude = 1.0;
};

enum class SymmetryClass { Generic, ParityEven, ParityOdd, WEven, WOdd };

std::string to_string(SymmetryClass s);
/// "generic", "aperp-even", "aperp-odd", "W-even", "W-odd".
SymmetryClass parse_symmetry(const std::string& name);

struct PhantomSpec {
  std::vector<GaussianBump> bumps;
  SymmetryClass symmetry = SymmetryClass::Generic;
};

/// Sum of amplitude * exp(-|x - c|^2 / (2 width^2)).
ScalarField gaussian_sum(const std::vector<GaussianBump>& bumps);

/// g passed through the symmetrizer of the class: parity parts across a-perp
/// or (g +- W_a g)/2. The W classes need |a| > 1 (ConfigError otherwise).
ScalarField symmetrize(ScalarField g, SymmetryClass symmetry, const Vector& a, int k);

/// Gaussian sum passed through the symmetrizer of the requested class.
ScalarField make_phantom(const PhantomSpec& spec, const Vector& a, int k);

/// Random bumps on S^n drawn from `seed`.
std::vector<GaussianBump> random_bumps(int n, int count, std::uint64_t seed);

/// max over grid points of |f - S f| where S is the class's symmetry
/// (R_a for parity, W_a for the W classes; sign per class); zero for generic.
double symmetry_residual(const ScalarField& f, SymmetryClass symmetry, const Vector& a, int k,
                         const SphereGrid& grid);

}  // namespace funkslice
