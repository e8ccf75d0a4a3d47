#pragma once

// Erdelyi-Kober operators in the t^2 variable, acting on radial profiles.

#include <functional>
#include <vector>

namespace funkslice {

/// Samples of a function of t >= 0 on consecutive segments [b_i, b_{i+1}].
/// Inside a segment the nodes sit at b_i + (b_{i+1} - b_i)(1 - cos(pi u))/2
/// for uniform u, and values are interpolated with cubic Lagrange in u.
/// The grading resolves square-root behaviour at segment ends, which is what
/// dual means show where the sphere of radius t about x starts leaving the
/// ball. The profile is zero beyond the last break.
class RadialProfile {
 public:
  RadialProfile(std::vector<double> breaks, int nodes_per_segment,
                const std::function<double(double)>& f);
  /// Raw construction from already computed samples (segment-major).
  RadialProfile(std::vector<double> breaks, int nodes_per_segment, std::vector<double> values);

  double operator()(double t) const;

  double t_max() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }
  int nodes_per_segment() const { return nodes_; }
  /// Strictly increasing abscissae of all samples (shared segment ends once).
  std::vector<double> grid() const;
  /// Node abscissa j of segment i.
  double node(int segment, int j) const;
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> breaks_;
  int nodes_ = 0;
  std::vector<double> values_;
};

/// Order d/2 of the fractional derivative together with the numerical recipe.
/// Derivatives in sigma = t^2 use a centred stencil of `stencil_points` nodes
/// with spacing relative_step * sigma.
struct FractionalOpSpec {
  int d = 1;
  int stencil_points = 5;
  double relative_step = 0.05;
  int quadrature_nodes = 12;

  int m() const { return d / 2; }
  double order() const { return 0.5 * d; }
  bool even() const { return d % 2 == 0; }
  /// Order of the inner Erdelyi-Kober integral for odd d (always 1/2).
  double ek_order() const { return 1.0 - 0.5 * d + m(); }
};

/// Weights of the centred finite-difference stencil for the q-th derivative
/// on nodes -p..p with unit spacing (Fornberg's recursion).
std::vector<double> centred_stencil(int derivative, int points);

/// (I^alpha_{-,2} [s^power f])(t) = 2/Gamma(alpha) int_t^inf s^power f(s) s ds / (s^2 - t^2)^{1 - alpha},
/// computed after the substitution w = (s^2 - t^2)^alpha, piecewise between
/// the images of the profile knots and a geometric ladder resolving s ~ t.
double ek_integral_at(double alpha, const RadialProfile& f, double t, int power = 0,
                      int quadrature_nodes = 12);
/// I^alpha f sampled on the grid of f (t = 0 excluded when power < 0).
RadialProfile ek_integral(double alpha, const RadialProfile& f, int quadrature_nodes = 12);

/// (-D)^q h at t with D = (1/2t) d/dt = d/dsigma, evaluated by the centred
/// stencil in sigma = t^2.
double minus_d_power_at(const FractionalOpSpec& spec, int q,
                        const std::function<double(double)>& h, double t);

/// D^{d/2}_{-,2} f at t > 0. Odd d: t^{2-d+2m} (-D)^{m+1} t^d g with
/// g = I^{1-d/2+m} t^{-2m-2} f. Even d: (-D)^{d/2} f.
double ek_derivative_at(const FractionalOpSpec& spec, const RadialProfile& f, double t);
/// Even-d branch for an arbitrary callable (no profile needed).
double ek_derivative_even_at(const FractionalOpSpec& spec, const std::function<double(double)>& f,
                             double t);
/// D^{d/2} f sampled at the grid points of f where the stencil fits inside (0, t_max).
RadialProfile ek_derivative(const FractionalOpSpec& spec, const RadialProfile& f);

}  // namespace funkslice
