#pragma once

// Linear-algebra substrate: projections, orthonormal frames, affine planes
// meeting the unit ball, and the polar decomposition used to normalize frames.

#include <Eigen/Dense>

#include <functional>

namespace funkslice {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Evaluable real function on R^m (used for fields on S^n and on balls).
using ScalarField = std::function<double(PointRef)>;

inline constexpr double kFrameTolerance = 1e-12;

/// P_a x = (a.x / |a|^2) a.
Vector project_along(const Vector& a, PointRef x);
/// Q_a x = x - P_a x.
Vector project_perp(const Vector& a, PointRef x);

/// Column-orthonormal matrix (an element of a Stiefel manifold).
class StiefelFrame {
 public:
  /// Validates orthonormality to `tolerance`; throws DomainError otherwise.
  explicit StiefelFrame(Matrix columns, double tolerance = kFrameTolerance);

  /// Orthonormalizes a full-column-rank matrix through its polar factor.
  static StiefelFrame orthonormalize(const Matrix& m);
  /// Coordinate frame [0; I_m] of size m in R^dim (the last m unit vectors).
  static StiefelFrame trailing_coordinates(int dim, int m);

  const Matrix& columns() const { return columns_; }
  int ambient_dim() const { return static_cast<int>(columns_.rows()); }
  int size() const { return static_cast<int>(columns_.cols()); }

  /// Orthogonal projector onto the column span.
  Matrix projector() const { return columns_ * columns_.transpose(); }
  /// max |columns' columns - I|.
  double gram_residual() const;

 private:
  Matrix columns_;
};

/// Completes a frame to an orthogonal matrix [complement, frame] using a
/// Householder QR whose R factor has a positive diagonal. The last
/// frame.size() columns equal the frame itself.
Matrix complete_frame(const StiefelFrame& frame);
/// Orthonormal basis of the orthogonal complement of the frame's span.
Matrix orthonormal_complement(const StiefelFrame& frame);

struct PolarFactor {
  Matrix orthonormal;  // M rho^{-1/2}
  Matrix psd_root;     // rho^{1/2}, rho = M'M
  Matrix inverse_root; // rho^{-1/2}
};

/// M = orthonormal * psd_root with the principal PSD root of M'M.
/// Throws SingularityError when M'M is numerically rank deficient.
PolarFactor polar_factor(const Matrix& m);

/// Principal square root and inverse square root of a symmetric positive
/// definite matrix.
Matrix spd_sqrt(const Matrix& s);
Matrix spd_inverse_sqrt(const Matrix& s);

/// |det(I_p + AB) - det(I_q + BA)|.
double det_identity_residual(const Matrix& a, const Matrix& b);

/// Affine k-plane {x : frame' x = offset} described by its normal frame.
class AffinePlane {
 public:
  AffinePlane(StiefelFrame normal, Vector offset);

  const StiefelFrame& normal() const { return normal_; }
  const Vector& offset() const { return offset_; }
  int ambient_dim() const { return normal_.ambient_dim(); }
  int dim() const { return normal_.ambient_dim() - normal_.size(); }

  /// Euclidean distance from the origin (= |offset|).
  double distance() const { return offset_.norm(); }
  bool meets_open_ball() const { return distance() < 1.0; }
  /// Point of the plane closest to the origin.
  Vector foot() const { return normal_.columns() * offset_; }
  /// Residual |frame' x - offset|.
  double residual(PointRef x) const;

 private:
  StiefelFrame normal_;
  Vector offset_;
};

/// k-plane through the center a: {x : xi'x = xi'a}.
class CentralPlane {
 public:
  CentralPlane(StiefelFrame normal, Vector center);

  const StiefelFrame& normal() const { return plane_.normal(); }
  const Vector& center() const { return center_; }
  const Vector& offset() const { return plane_.offset(); }
  const AffinePlane& affine() const { return plane_; }
  int dim() const { return plane_.dim(); }
  bool meets_open_ball() const { return plane_.meets_open_ball(); }

 private:
  Vector center_;
  AffinePlane plane_;
};

/// k-plane parallel to the direction a: {y : eta'y = t}, eta orthogonal to a.
class ParallelPlane {
 public:
  /// Throws DomainError unless every frame column is orthogonal to a.
  ParallelPlane(StiefelFrame normal, Vector direction, Vector offset);

  const StiefelFrame& normal() const { return plane_.normal(); }
  const Vector& direction() const { return direction_; }
  const Vector& offset() const { return plane_.offset(); }
  const AffinePlane& affine() const { return plane_; }
  int dim() const { return plane_.dim(); }
  bool meets_open_ball() const { return plane_.meets_open_ball(); }

 private:
  Vector direction_;
  AffinePlane plane_;
};

/// Distance between two affine planes of equal dimension, measured as the
/// spectral norm of the difference of normal-space projectors plus the
/// distance between their feet. Zero iff the planes coincide as sets.
double plane_distance(const AffinePlane& p, const AffinePlane& q);

/// Sphere S^n intersected with a plane: a (k-1)-sphere of given center,
/// radius and tangent basis (an orthonormal basis of the plane directions).
struct SphereSection {
  Vector center;
  double radius = 0.0;
  Matrix basis;
};

/// Throws EmptySectionError when the plane misses the open unit ball.
SphereSection sphere_section(const AffinePlane& plane);

}  // namespace funkslice
