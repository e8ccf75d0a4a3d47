#include "funkslice/forward.hpp"

#include "funkslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace funkslice {

EuclideanPlane::EuclideanPlane(StiefelFrame directions, Vector shift)
    : directions_(std::move(directions)), shift_(std::move(shift)) {
  if (shift_.size() != directions_.ambient_dim()) {
    throw DomainError("EuclideanPlane: shift dimension mismatch");
  }
  const Vector dots = directions_.columns().transpose() * shift_;
  if (dots.size() > 0 && dots.cwiseAbs().maxCoeff() > kFrameTolerance * (1.0 + shift_.norm())) {
    throw DomainError("EuclideanPlane: shift must be orthogonal to the plane directions");
  }
}

double funk_transform(const ScalarField& f, const CentralPlane& plane, const SectionRule& rule) {
  if (!plane.meets_open_ball()) {
    return 0.0;
  }
  return integrate(f, sphere_section_nodes(plane, rule));
}

double parallel_slice_transform(const ScalarField& f, const ParallelPlane& plane,
                                const SectionRule& rule) {
  if (!plane.meets_open_ball()) {
    return 0.0;
  }
  return integrate(f, sphere_section_nodes(plane, rule));
}

double radon_john(const ScalarField& phi, const EuclideanPlane& plane,
                  const BallSectionRule& rule) {
  const Vector& u = plane.shift();
  const double u2 = u.squaredNorm();
  if (!(u2 < 1.0)) {
    return 0.0;
  }
  const double r = std::sqrt(1.0 - u2);
  const int d = plane.dim();
  const Matrix& dirs = plane.directions().columns();
  double sum = 0.0;
  Vector y(u.size());
  if (d == 1) {
    const Rule1D gl = gauss_legendre(rule.angle_nodes, -0.5 * std::numbers::pi,
                                     0.5 * std::numbers::pi);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double b = gl.nodes[i];
      y = u + (r * std::sin(b)) * dirs.col(0);
      sum += gl.weights[i] * r * std::cos(b) * phi(y);
    }
    return sum;
  }
  const Rule1D gl = gauss_legendre(rule.angle_nodes, 0.0, 0.5 * std::numbers::pi);
  const SphereRule dirs_rule = unit_sphere_rule(d - 1, rule.sphere);
  const Matrix ambient_dirs = dirs * dirs_rule.nodes;
  const double rd = std::pow(r, d);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double b = gl.nodes[i];
    const double radial = rd * std::pow(std::sin(b), d - 1) * std::cos(b) * gl.weights[i];
    const double rho = r * std::sin(b);
    for (Eigen::Index q = 0; q < dirs_rule.size(); ++q) {
      y = u + rho * ambient_dirs.col(q);
      sum += radial * dirs_rule.weights(q) * phi(y);
    }
  }
  return sum;
}

double funk_normalized(const ScalarField& f, const Matrix& rotation, int frame_size,
                       const Vector& a, const SectionRule& rule) {
  const int dim = static_cast<int>(rotation.rows());
  const int k = dim - frame_size;
  if (rotation.cols() != dim || a.size() != dim || k < 1) {
    throw DomainError("funk_normalized: inconsistent rotation, center or frame size");
  }
  const Vector c = rotation.rightCols(frame_size).transpose() * a;
  const double c2 = c.squaredNorm();
  if (!(c2 < 1.0)) {
    return 0.0;
  }
  const double r = std::sqrt(1.0 - c2);
  const SphereRule ref = unit_sphere_rule(k - 1, rule);
  const Vector foot = rotation.rightCols(frame_size) * c;
  const Matrix nodes = (r * rotation.leftCols(k) * ref.nodes).colwise() + foot;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < nodes.cols(); ++i) {
    sum += ref.weights(i) * f(nodes.col(i));
  }
  return sum / ref.weights.sum();
}

double funk_normalized(const ScalarField& f, const StiefelFrame& xi, const Vector& a,
                       const SectionRule& rule) {
  return funk_normalized(f, complete_frame(xi), xi.size(), a, rule);
}

LinkEstimate dimension_link_rhs(const ScalarField& f, const StiefelFrame& eta, const Vector& a,
                                int k, int samples, std::uint64_t seed,
                                const SectionRule& rule) {
  const int dim = eta.ambient_dim();
  const int n = dim - 1;
  const int ell = dim - eta.size();
  if (!(1 < k && k < ell && ell <= n)) {
    throw DomainError("dimension_link_rhs: need 1 < k < l <= n");
  }
  if (samples < 2) {
    throw DomainError("dimension_link_rhs: need at least two samples");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Matrix perp = Matrix::Identity(dim, dim) - eta.projector();
  const int extra = ell - k;

  double sum = 0.0;
  double sum2 = 0.0;
  LinkEstimate est;
  Matrix xi(dim, extra + eta.size());
  xi.rightCols(eta.size()) = eta.columns();
  for (int s = 0; s < samples; ++s) {
    Matrix g(dim, extra);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      g.data()[i] = normal(rng);
    }
    xi.leftCols(extra) = polar_factor(perp * g).orthonormal;
    const StiefelFrame frame(xi, 1e-10);
    if (!((frame.columns().transpose() * a).squaredNorm() < 1.0)) {
      ++est.empty_sections;
    }
    const double v = funk_normalized(f, frame, a, rule);
    sum += v;
    sum2 += v * v;
  }
  est.samples = samples;
  est.mean = sum / samples;
  const double var = std::max(0.0, (sum2 - samples * est.mean * est.mean) / (samples - 1));
  est.standard_error = std::sqrt(var / samples);
  return est;
}

ScalarField slice_ball_function(const Vector& a, ScalarField f) {
  const Vector a_hat = a.normalized();
  return [a_hat, f = std::move(f)](PointRef y) {
    const double h2 = 1.0 - y.squaredNorm();
    if (!(h2 > 0.0)) {
      return 0.0;
    }
    // both sheets over y; equals 2 f(y + h a~) / h when f is even across a-perp
    const double h = std::sqrt(h2);
    return (f(y + h * a_hat) + f(y - h * a_hat)) / h;
  };
}

double slice_reduction_rhs(const ScalarField& f, const ParallelPlane& plane,
                           const BallSectionRule& rule) {
  if (!plane.meets_open_ball()) {
    return 0.0;
  }
  const int dim = plane.normal().ambient_dim();
  const int cols = plane.normal().size();
  Matrix spanned(dim, cols + 1);
  spanned.leftCols(cols) = plane.normal().columns();
  spanned.col(cols) = plane.direction().normalized();
  const StiefelFrame normal_and_axis(spanned, 1e-10);
  const Matrix dirs = orthonormal_complement(normal_and_axis);
  const Vector u = plane.affine().foot();
  const EuclideanPlane section(StiefelFrame(dirs), u);
  const double scale = std::sqrt(1.0 - u.squaredNorm());
  return scale * radon_john(slice_ball_function(plane.direction(), f), section, rule);
}

}  // namespace funkslice
