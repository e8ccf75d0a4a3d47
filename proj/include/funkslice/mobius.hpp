#pragma once

// Automorphisms of the unit ball and sphere that intertwine transforms with
// an exterior center and parallel slice transforms.

#include "funkslice/geometry.hpp"
#include "funkslice/quadrature.hpp"

namespace funkslice {

/// a != 0 together with its Kelvin image a* = a/|a|^2, unit direction, the
/// scale s_{a*} = sqrt(1 - |a*|^2) (only meaningful for |a| >= 1) and the
/// section dimension k.
class CenterContext {
 public:
  CenterContext(Vector a, int k);

  const Vector& a() const { return a_; }
  const Vector& a_star() const { return a_star_; }
  const Vector& a_hat() const { return a_hat_; }
  double s_a_star() const { return s_a_star_; }
  double norm() const { return norm_; }
  int k() const { return k_; }
  int ambient_dim() const { return static_cast<int>(a_.size()); }
  bool exterior() const { return norm_ > 1.0; }

  /// Throws DomainError unless |a| > 1.
  void require_exterior(const char* what) const;

 private:
  Vector a_;
  Vector a_star_;
  Vector a_hat_;
  double norm_ = 0.0;
  double s_a_star_ = 0.0;
  int k_ = 0;
};

/// a / |a|^2.
Vector kelvin(const Vector& a);

/// The involutive ball automorphism
///   phi_b x = (b - P_b x - s_b Q_b x) / (1 - x.b),  s_b = sqrt(1 - |b|^2),
/// for |b| < 1. `denominator_perturbation` is added to the constant 1 of the
/// denominator; it exists only so that verification suites can demonstrate
/// sensitivity to a corrupted map.
class MobiusMap {
 public:
  explicit MobiusMap(Vector b, double denominator_perturbation = 0.0);

  Vector operator()(PointRef x) const;
  const Vector& center() const { return b_; }

 private:
  Vector b_;
  double b2_ = 0.0;
  double shift_ = 0.0;
};

/// phi_a x. Throws DomainError for |a| >= 1 and PoleError when |1 - x.a| < 1e-13.
Vector mobius(const Vector& a, PointRef x);

/// R_a x = x - 2 (x.a/|a|^2) a.
Vector reflect_hyperplane(const Vector& a, PointRef x);

/// tau_a x: second intersection with S^n of the line through a and x.
Vector reflect_through_center(const CenterContext& ctx, PointRef x);

/// Image of a plane through a under phi_{a*}: a plane parallel to a.
ParallelPlane central_to_parallel(const CenterContext& ctx, const CentralPlane& plane);
/// Image of a plane parallel to a under phi_{a*}: a plane through a.
CentralPlane parallel_to_central(const CenterContext& ctx, const ParallelPlane& plane);

/// (M f)(y) = (s_{a*} / (1 - a*.y))^{k-1} f(phi_{a*} y).
ScalarField multiplier_M(const CenterContext& ctx, ScalarField f);
ScalarField multiplier_M(const CenterContext& ctx, ScalarField f, const MobiusMap& map);
/// (M^{-1} f)(x) = s_{a*}^{1-k} (1 - a*.phi_{a*} x)^{k-1} f(phi_{a*} x).
ScalarField multiplier_M_inverse(const CenterContext& ctx, ScalarField f);

/// rho_{a*}(x) = ((|a|^2 - 1) / |a - x|^2)^{k-1}.
double weight_rho(const CenterContext& ctx, PointRef x);
/// The same weight written through phi_{a*} and R_a:
/// ((1 - a*.phi x) / (1 - a*.R_a phi x))^{k-1}.
double weight_rho_mobius_form(const CenterContext& ctx, PointRef x);

/// (W_a f)(x) = rho_{a*}(x) f(tau_a x).
ScalarField involution_W(const CenterContext& ctx, ScalarField f);
/// (g + sign W_a g) / 2 for sign = +1 or -1.
ScalarField symmetrize_W(const CenterContext& ctx, ScalarField g, int sign);

struct ParityParts {
  ScalarField plus;
  ScalarField minus;
};

/// f = f_+ + f_-, f_+ even and f_- odd under R_a.
ParityParts parity_parts(const Vector& a, ScalarField f);

struct MeasureChange {
  double direct = 0.0;       // integral of f over S^n
  double transformed = 0.0;  // s^n integral of (f o phi_{a*})(y) / (1 - a*.y)^n
  double residual() const;
};

/// Both sides of the change of variables under phi_{a*} on S^n, integrated
/// with the same sphere rule.
MeasureChange measure_change(const CenterContext& ctx, const ScalarField& f,
                             const SphereRule& rule);
double measure_change_residual(const CenterContext& ctx, const ScalarField& f,
                               const SphereRule& rule);

}  // namespace funkslice
