#include "funkslice/mobius.hpp"

#include "funkslice/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace funkslice {

CenterContext::CenterContext(Vector a, int k) : a_(std::move(a)), k_(k) {
  norm_ = a_.norm();
  if (!(norm_ > 0.0) || !a_.allFinite()) {
    throw DomainError("CenterContext: center must be a finite nonzero vector");
  }
  if (k < 1 || k > a_.size() - 1) {
    throw DomainError("CenterContext: section dimension k must satisfy 1 <= k <= n");
  }
  a_star_ = a_ / (norm_ * norm_);
  a_hat_ = a_ / norm_;
  const double r = 1.0 / norm_;
  s_a_star_ = norm_ >= 1.0 ? std::sqrt((1.0 - r) * (1.0 + r))
                           : std::numeric_limits<double>::quiet_NaN();
}

void CenterContext::require_exterior(const char* what) const {
  if (!exterior()) {
    throw DomainError(std::string(what) + ": requires an exterior center |a| > 1");
  }
}

Vector kelvin(const Vector& a) {
  const double n2 = a.squaredNorm();
  if (!(n2 > 0.0)) {
    throw DomainError("kelvin: zero vector has no inversion");
  }
  return a / n2;
}

MobiusMap::MobiusMap(Vector b, double denominator_perturbation)
    : b_(std::move(b)), shift_(denominator_perturbation) {
  b2_ = b_.squaredNorm();
  if (!(b2_ < 1.0)) {
    throw DomainError("MobiusMap: center must lie in the open unit ball");
  }
}

Vector MobiusMap::operator()(PointRef x) const {
  // Numerator and denominator are each far more sensitive than the map near
  // the boundary, so the map is evaluated in extended precision
  using Wide = long double;
  const Eigen::Index dim = b_.size();
  Wide xb = 0, bb = 0, b_minus_x = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    xb += Wide(x(i)) * b_(i);
    bb += Wide(b_(i)) * b_(i);
    b_minus_x += Wide(b_(i)) * (Wide(b_(i)) - x(i));
  }
  const Wide denom = (Wide(1) - xb) + shift_;
  if (std::abs(static_cast<double>(denom)) < 1e-13) {
    throw PoleError("mobius: point lies on the pole x.a = 1");
  }
  Vector out(dim);
  if (bb == 0) {
    for (Eigen::Index i = 0; i < dim; ++i) out(i) = static_cast<double>(-x(i) / denom);
    return out;
  }
  const Wide s = std::sqrt(Wide(1) - bb);
  // b - P_b x written as (b.(b - x)/|b|^2) b: it is small exactly where the
  // denominator is, and the direct difference would cancel
  const Wide toward = b_minus_x / bb;
  const Wide along = xb / bb;
  for (Eigen::Index i = 0; i < dim; ++i) {
    out(i) = static_cast<double>((toward * b_(i) - s * (x(i) - along * b_(i))) / denom);
  }
  return out;
}

Vector mobius(const Vector& a, PointRef x) { return MobiusMap(a)(x); }

Vector reflect_hyperplane(const Vector& a, PointRef x) {
  const double n2 = a.squaredNorm();
  if (!(n2 > 0.0)) {
    throw DomainError("reflect_hyperplane: zero normal vector");
  }
  return x - (2.0 * a.dot(x) / n2) * a;
}

Vector reflect_through_center(const CenterContext& ctx, PointRef x) {
  ctx.require_exterior("reflect_through_center");
  const Vector& a = ctx.a();
  const double a2 = a.squaredNorm();
  return ((a2 - 1.0) * x + 2.0 * (1.0 - x.dot(a)) * a) / (x - a).squaredNorm();
}

ParallelPlane central_to_parallel(const CenterContext& ctx, const CentralPlane& plane) {
  ctx.require_exterior("central_to_parallel");
  if (!plane.meets_open_ball()) {
    throw InvalidPlaneError("central_to_parallel: plane misses the open unit ball");
  }
  const Matrix& xi = plane.normal().columns();
  const Vector& u = ctx.a_hat();
  const Matrix q_xi = xi - u * (u.transpose() * xi);
  const PolarFactor polar = polar_factor(q_xi);
  Vector t = -ctx.s_a_star() * (polar.inverse_root * plane.offset());
  Matrix eta = polar.orthonormal;
  // remove the roundoff component along a so the frame lies in a-perp exactly
  eta -= u * (u.transpose() * eta);
  return ParallelPlane(StiefelFrame(std::move(eta)), ctx.a(), std::move(t));
}

CentralPlane parallel_to_central(const CenterContext& ctx, const ParallelPlane& plane) {
  ctx.require_exterior("parallel_to_central");
  if (!plane.meets_open_ball()) {
    throw InvalidPlaneError("parallel_to_central: plane misses the open unit ball");
  }
  const double s = ctx.s_a_star();
  const Vector& t = plane.offset();
  // the a* term enters with a minus sign: inverting t = -s rho^{-1/2} xi'a
  const Matrix scaled = s * plane.normal().columns() - ctx.a_star() * t.transpose();
  const Matrix gram = s * s * Matrix::Identity(t.size(), t.size()) +
                      ctx.a_star().squaredNorm() * t * t.transpose();
  return CentralPlane(StiefelFrame(scaled * spd_inverse_sqrt(gram)), ctx.a());
}

ScalarField multiplier_M(const CenterContext& ctx, ScalarField f) {
  ctx.require_exterior("multiplier_M");
  return multiplier_M(ctx, std::move(f), MobiusMap(ctx.a_star()));
}

ScalarField multiplier_M(const CenterContext& ctx, ScalarField f, const MobiusMap& map) {
  ctx.require_exterior("multiplier_M");
  const Vector a_star = ctx.a_star();
  const double s = ctx.s_a_star();
  const int power = ctx.k() - 1;
  return [f = std::move(f), map, a_star, s, power](PointRef y) {
    const double factor = std::pow(s / (1.0 - a_star.dot(y)), power);
    return factor * f(map(y));
  };
}

ScalarField multiplier_M_inverse(const CenterContext& ctx, ScalarField f) {
  ctx.require_exterior("multiplier_M_inverse");
  const MobiusMap map(ctx.a_star());
  const Vector a_star = ctx.a_star();
  const double s = ctx.s_a_star();
  const int power = ctx.k() - 1;
  return [f = std::move(f), map, a_star, s, power](PointRef x) {
    const Vector y = map(x);
    return std::pow((1.0 - a_star.dot(y)) / s, power) * f(y);
  };
}

double weight_rho(const CenterContext& ctx, PointRef x) {
  ctx.require_exterior("weight_rho");
  const double ratio = (ctx.a().squaredNorm() - 1.0) / (ctx.a() - x).squaredNorm();
  return std::pow(ratio, ctx.k() - 1);
}

double weight_rho_mobius_form(const CenterContext& ctx, PointRef x) {
  ctx.require_exterior("weight_rho_mobius_form");
  const MobiusMap map(ctx.a_star());
  const Vector y = map(x);
  const Vector ry = reflect_hyperplane(ctx.a(), y);
  const double ratio = (1.0 - ctx.a_star().dot(y)) / (1.0 - ctx.a_star().dot(ry));
  return std::pow(ratio, ctx.k() - 1);
}

ScalarField involution_W(const CenterContext& ctx, ScalarField f) {
  ctx.require_exterior("involution_W");
  return [ctx, f = std::move(f)](PointRef x) {
    return weight_rho(ctx, x) * f(reflect_through_center(ctx, x));
  };
}

ScalarField symmetrize_W(const CenterContext& ctx, ScalarField g, int sign) {
  if (sign != 1 && sign != -1) {
    throw DomainError("symmetrize_W: sign must be +1 or -1");
  }
  ScalarField wg = involution_W(ctx, g);
  return [g = std::move(g), wg = std::move(wg), sign](PointRef x) {
    return 0.5 * (g(x) + sign * wg(x));
  };
}

ParityParts parity_parts(const Vector& a, ScalarField f) {
  if (!(a.squaredNorm() > 0.0)) {
    throw DomainError("parity_parts: zero direction vector");
  }
  ParityParts parts;
  parts.plus = [a, f](PointRef x) { return 0.5 * (f(x) + f(reflect_hyperplane(a, x))); };
  parts.minus = [a, f](PointRef x) { return 0.5 * (f(x) - f(reflect_hyperplane(a, x))); };
  return parts;
}

double MeasureChange::residual() const { return std::abs(direct - transformed); }

MeasureChange measure_change(const CenterContext& ctx, const ScalarField& f,
                             const SphereRule& rule) {
  ctx.require_exterior("measure_change");
  if (rule.dim() + 1 != ctx.ambient_dim()) {
    throw DomainError("measure_change: sphere rule dimension does not match the center");
  }
  const int n = rule.dim();
  const MobiusMap map(ctx.a_star());
  const Vector& a_star = ctx.a_star();
  const double scale = std::pow(ctx.s_a_star(), n);
  MeasureChange out;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    const auto y = rule.nodes.col(i);
    out.direct += rule.weights(i) * f(y);
    out.transformed += rule.weights(i) * f(map(y)) / std::pow(1.0 - a_star.dot(y), n);
  }
  out.transformed *= scale;
  return out;
}

double measure_change_residual(const CenterContext& ctx, const ScalarField& f,
                               const SphereRule& rule) {
  return measure_change(ctx, f, rule).residual();
}

}  // namespace funkslice
