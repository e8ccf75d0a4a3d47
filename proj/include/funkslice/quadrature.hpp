#pragma once

#include "funkslice/geometry.hpp"

#include <vector>

namespace funkslice {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi].
Rule1D gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

/// Surface area of the unit j-sphere S^j in R^{j+1}.
double unit_sphere_area(int j);

/// Node counts for quadrature over the (k-1)-sphere of a section.
/// Circles use the trapezoid rule; 2-spheres a Gauss-Legendre (in cos of the
/// polar angle) x trapezoid (azimuth) product; higher spheres recurse in the
/// polar angle.
struct SectionRule {
  int circle_nodes = 256;
  int polar_nodes = 32;
  int azimuth_nodes = 64;

  bool operator==(const SectionRule&) const = default;
};

/// Quadrature rule on the unit sphere S^j: nodes are the columns of a
/// (j+1) x N matrix; weights sum to unit_sphere_area(j).
struct SphereRule {
  Matrix nodes;
  Vector weights;

  int dim() const { return static_cast<int>(nodes.rows()) - 1; }
  Eigen::Index size() const { return nodes.cols(); }
};

SphereRule unit_sphere_rule(int j, const SectionRule& rule);

/// Nodes on S^n intersected with the plane and matching surface weights. The
/// weights integrate the (k-1)-dimensional measure d sigma of the section.
struct SectionNodes {
  Matrix nodes;
  Vector weights;
};

/// Maps a reference rule on the unit (k-1)-sphere onto the section.
SectionNodes section_nodes(const SphereSection& section, const SphereRule& reference);
SectionNodes sphere_section_nodes(const AffinePlane& plane, const SectionRule& rule);
SectionNodes sphere_section_nodes(const CentralPlane& plane, const SectionRule& rule);
SectionNodes sphere_section_nodes(const ParallelPlane& plane, const SectionRule& rule);

/// Sum of w_i f(x_i).
double integrate(const ScalarField& f, const SectionNodes& rule);

}  // namespace funkslice
