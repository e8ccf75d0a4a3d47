#include "funkslice/quadrature.hpp"

#include "funkslice/errors.hpp"

#include <cmath>
#include <numbers>

namespace funkslice {

Rule1D gauss_legendre(int n, double lo, double hi) {
  if (n < 1) {
    throw DomainError("gauss_legendre: need at least one node");
  }
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // three-term recurrence for P_n and its derivative
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pnm1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

double unit_sphere_area(int j) {
  if (j < 0) {
    throw DomainError("unit_sphere_area: negative dimension");
  }
  const double h = 0.5 * (j + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

SphereRule unit_sphere_rule(int j, const SectionRule& rule) {
  SphereRule out;
  if (j == 0) {
    out.nodes.resize(1, 2);
    out.nodes << -1.0, 1.0;
    out.weights = Vector::Ones(2);
    return out;
  }
  if (j == 1) {
    const int m = rule.circle_nodes;
    if (m < 3) {
      throw DomainError("unit_sphere_rule: circle needs at least 3 nodes");
    }
    out.nodes.resize(2, m);
    out.weights = Vector::Constant(m, 2.0 * std::numbers::pi / m);
    for (int i = 0; i < m; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / m;
      out.nodes(0, i) = std::cos(phi);
      out.nodes(1, i) = std::sin(phi);
    }
    return out;
  }
  if (j == 2) {
    const Rule1D gl = gauss_legendre(rule.polar_nodes);
    const int na = rule.azimuth_nodes;
    if (na < 3) {
      throw DomainError("unit_sphere_rule: azimuth needs at least 3 nodes");
    }
    const int np = rule.polar_nodes;
    out.nodes.resize(3, np * na);
    out.weights.resize(np * na);
    for (int p = 0; p < np; ++p) {
      const double z = gl.nodes[p];
      const double r = std::sqrt(1.0 - z * z);
      for (int q = 0; q < na; ++q) {
        const double phi = 2.0 * std::numbers::pi * q / na;
        const int idx = p * na + q;
        out.nodes(0, idx) = r * std::cos(phi);
        out.nodes(1, idx) = r * std::sin(phi);
        out.nodes(2, idx) = z;
        out.weights(idx) = gl.weights[p] * 2.0 * std::numbers::pi / na;
      }
    }
    return out;
  }
  // S^j = {(sin(theta) w, cos(theta)) : w in S^{j-1}}, d sigma = sin^{j-1} d theta d w
  const SphereRule inner = unit_sphere_rule(j - 1, rule);
  const Rule1D gl = gauss_legendre(rule.polar_nodes, 0.0, std::numbers::pi);
  const Eigen::Index ni = inner.size();
  const int np = rule.polar_nodes;
  out.nodes.resize(j + 1, np * ni);
  out.weights.resize(np * ni);
  for (int p = 0; p < np; ++p) {
    const double th = gl.nodes[p];
    const double w = gl.weights[p] * std::pow(std::sin(th), j - 1);
    for (Eigen::Index q = 0; q < ni; ++q) {
      const Eigen::Index idx = p * ni + q;
      out.nodes.col(idx).head(j) = std::sin(th) * inner.nodes.col(q);
      out.nodes(j, idx) = std::cos(th);
      out.weights(idx) = w * inner.weights(q);
    }
  }
  return out;
}

SectionNodes section_nodes(const SphereSection& section, const SphereRule& reference) {
  const int k = static_cast<int>(section.basis.cols());
  if (reference.dim() != k - 1) {
    throw DomainError("section_nodes: reference rule dimension does not match the section");
  }
  SectionNodes out;
  out.nodes = (section.radius * section.basis) * reference.nodes;
  out.nodes.colwise() += section.center;
  out.weights = reference.weights * std::pow(section.radius, k - 1);
  return out;
}

SectionNodes sphere_section_nodes(const AffinePlane& plane, const SectionRule& rule) {
  const SphereSection s = sphere_section(plane);
  return section_nodes(s, unit_sphere_rule(plane.dim() - 1, rule));
}

SectionNodes sphere_section_nodes(const CentralPlane& plane, const SectionRule& rule) {
  return sphere_section_nodes(plane.affine(), rule);
}

SectionNodes sphere_section_nodes(const ParallelPlane& plane, const SectionRule& rule) {
  return sphere_section_nodes(plane.affine(), rule);
}

double integrate(const ScalarField& f, const SectionNodes& rule) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.cols(); ++i) {
    sum += rule.weights(i) * f(rule.nodes.col(i));
  }
  return sum;
}

}  // namespace funkslice
