#include "funkslice/geometry.hpp"

#include "funkslice/errors.hpp"

#include <cmath>
#include <string>

namespace funkslice {

namespace {

void require_nonzero(const Vector& a, const char* what) {
  if (!(a.squaredNorm() > 0.0)) {
    throw DomainError(std::string(what) + ": zero direction vector");
  }
}

}  // namespace

Vector project_along(const Vector& a, PointRef x) {
  require_nonzero(a, "project_along");
  return (a.dot(x) / a.squaredNorm()) * a;
}

Vector project_perp(const Vector& a, PointRef x) {
  require_nonzero(a, "project_perp");
  return x - (a.dot(x) / a.squaredNorm()) * a;
}

StiefelFrame::StiefelFrame(Matrix columns, double tolerance) : columns_(std::move(columns)) {
  if (columns_.cols() > columns_.rows() || columns_.cols() == 0) {
    throw DomainError("StiefelFrame: need 0 < m <= ambient dimension");
  }
  if (!columns_.allFinite()) {
    throw DomainError("StiefelFrame: non-finite entries");
  }
  const double residual = gram_residual();
  if (residual > tolerance) {
    throw DomainError("StiefelFrame: columns not orthonormal (residual " +
                      std::to_string(residual) + ")");
  }
}

StiefelFrame StiefelFrame::orthonormalize(const Matrix& m) {
  return StiefelFrame(polar_factor(m).orthonormal);
}

StiefelFrame StiefelFrame::trailing_coordinates(int dim, int m) {
  Matrix c = Matrix::Zero(dim, m);
  c.bottomRows(m).setIdentity();
  return StiefelFrame(std::move(c));
}

double StiefelFrame::gram_residual() const {
  const Matrix gram = columns_.transpose() * columns_;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Matrix complete_frame(const StiefelFrame& frame) {
  const int p = frame.ambient_dim();
  const int m = frame.size();
  Eigen::HouseholderQR<Matrix> qr(frame.columns());
  const Matrix q = qr.householderQ() * Matrix::Identity(p, p);

  Matrix out(p, p);
  out.rightCols(m) = frame.columns();
  out.leftCols(p - m) = q.rightCols(p - m);
  if (p > m && out.determinant() < 0.0) {
    out.col(0) = -out.col(0);
  }
  return out;
}

Matrix orthonormal_complement(const StiefelFrame& frame) {
  const int p = frame.ambient_dim();
  return complete_frame(frame).leftCols(p - frame.size());
}

Matrix spd_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Matrix spd_inverse_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.cwiseAbs().maxCoeff())) {
    throw SingularityError("spd_inverse_sqrt: matrix is singular");
  }
  return eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

PolarFactor polar_factor(const Matrix& m) {
  const Matrix rho = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
  const Vector ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (!(largest > 0.0) || !(ev.minCoeff() >= 1e-12 * largest)) {
    throw SingularityError("polar_factor: matrix is rank deficient");
  }
  const Matrix& v = eig.eigenvectors();
  PolarFactor out;
  out.psd_root = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
  out.inverse_root = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  out.orthonormal = m * out.inverse_root;
  return out;
}

double det_identity_residual(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    throw DomainError("det_identity_residual: shapes must be p x q and q x p");
  }
  const Matrix left = Matrix::Identity(a.rows(), a.rows()) + a * b;
  const Matrix right = Matrix::Identity(a.cols(), a.cols()) + b * a;
  return std::abs(left.determinant() - right.determinant());
}

AffinePlane::AffinePlane(StiefelFrame normal, Vector offset)
    : normal_(std::move(normal)), offset_(std::move(offset)) {
  if (offset_.size() != normal_.size()) {
    throw DomainError("AffinePlane: offset size must match the normal frame size");
  }
}

double AffinePlane::residual(PointRef x) const {
  return (normal_.columns().transpose() * x - offset_).norm();
}

CentralPlane::CentralPlane(StiefelFrame normal, Vector center)
    : center_(std::move(center)),
      plane_(normal, normal.columns().transpose() * center_) {
  if (center_.size() != normal.ambient_dim()) {
    throw DomainError("CentralPlane: center dimension mismatch");
  }
}

ParallelPlane::ParallelPlane(StiefelFrame normal, Vector direction, Vector offset)
    : direction_(std::move(direction)), plane_(std::move(normal), std::move(offset)) {
  require_nonzero(direction_, "ParallelPlane");
  const Vector dots = plane_.normal().columns().transpose() * direction_.normalized();
  if (dots.cwiseAbs().maxCoeff() > kFrameTolerance) {
    throw DomainError("ParallelPlane: normal frame is not orthogonal to the direction");
  }
}

double plane_distance(const AffinePlane& p, const AffinePlane& q) {
  if (p.ambient_dim() != q.ambient_dim() || p.dim() != q.dim()) {
    return INFINITY;
  }
  const Matrix diff = p.normal().projector() - q.normal().projector();
  const double proj = Eigen::JacobiSVD<Matrix>(diff).singularValues()(0);
  return proj + (p.foot() - q.foot()).norm();
}

SphereSection sphere_section(const AffinePlane& plane) {
  const double dist = plane.distance();
  if (!(dist < 1.0)) {
    throw EmptySectionError("sphere_section: plane does not meet the open unit ball");
  }
  SphereSection s;
  s.center = plane.foot();
  s.radius = std::sqrt((1.0 - dist) * (1.0 + dist));
  s.basis = orthonormal_complement(plane.normal());
  return s;
}

}  // namespace funkslice
