#include "funkslice/errors.hpp"
#include "funkslice/fields.hpp"
#include "funkslice/mobius.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace funkslice;
using fstest::Sampler;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double gap(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

ScalarField bumps(int n, std::uint64_t seed) { return gaussian_sum(random_bumps(n, 3, seed)); }

SphereRule fine_rule(int polar, int azimuth) {
  SectionRule r;
  r.polar_nodes = polar;
  r.azimuth_nodes = azimuth;
  return unit_sphere_rule(2, r);
}

// a valid plane through a: normal frame with |xi'a| < 1
CentralPlane random_central(Sampler& s, const Vector& a, int cols) {
  for (;;) {
    const StiefelFrame xi = s.frame(static_cast<int>(a.size()), cols);
    if ((xi.columns().transpose() * a).norm() < 0.95) return CentralPlane(xi, a);
  }
}

}  // namespace

TEST_CASE("kelvin point") {
  CHECK(gap(kelvin(vec({2, 0, 0})), vec({0.5, 0, 0})) == 0.0);
  Sampler s(1);
  for (int i = 0; i < 100; ++i) {
    const Vector u = s.on_sphere(3);
    CHECK(gap(kelvin(u), u) <= 1e-15);
    const Vector a = s.gaussian(4);
    CHECK(gap(kelvin(kelvin(a)), a) <= 1e-14 * a.norm());
  }
  CHECK_THROWS_AS(kelvin(Vector::Zero(3)), DomainError);
}

TEST_CASE("mobius on fixed inputs") {
  const Vector a = vec({0.5, 0, 0});
  CHECK(gap(mobius(a, Vector::Zero(3)), a) <= 1e-16);
  const Vector y = mobius(a, vec({0, 1, 0}));
  CHECK(gap(y, vec({0.5, -std::sqrt(0.75), 0})) <= 1e-15);
  CHECK(std::abs(y.norm() - 1.0) <= 1e-15);
  CHECK(mobius(a, a).norm() <= 1e-16);
}

TEST_CASE("mobius sphere identity and interior identity") {
  Sampler s(2);
  for (int i = 0; i < 10000; ++i) {
    const int dim = 3 + i % 2;
    const Vector b = s.in_ball(dim, 0.999);
    const Vector x = s.on_sphere(dim);
    CHECK(std::abs(1.0 - mobius(b, x).squaredNorm()) <= 1e-13);
    // 1 - |phi x|^2 = (1 - |b|^2)(1 - |x|^2) / (1 - x.b)^2
    const Vector z = s.in_ball(dim);
    const double lhs = 1.0 - mobius(b, z).squaredNorm();
    const double rhs = (1.0 - b.squaredNorm()) * (1.0 - z.squaredNorm()) / std::pow(1.0 - z.dot(b), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-13);
  }
}

TEST_CASE("mobius is an involution on the sphere") {
  Sampler s(3);
  for (int i = 0; i < 10000; ++i) {
    const Vector b = s.in_ball(3, 0.99);
    const Vector x = s.on_sphere(3);
    CHECK(gap(mobius(b, mobius(b, x)), x) <= 1e-11);
  }
}

TEST_CASE("mobius domain and pole errors") {
  CHECK_THROWS_AS(mobius(vec({1, 0, 0}), vec({0, 1, 0})), DomainError);
  CHECK_THROWS_AS(mobius(vec({0.5, 0, 0}), vec({2, 0, 0})), PoleError);
}

TEST_CASE("hyperplane reflection") {
  CHECK(gap(reflect_hyperplane(vec({0, 0, 1}), vec({1, 2, 3})), vec({1, 2, -3})) == 0.0);
  CHECK(gap(reflect_hyperplane(vec({0, 0, 3}), vec({1, 2, 0})), vec({1, 2, 0})) == 0.0);
  Sampler s(4);
  for (int i = 0; i < 1000; ++i) {
    const Vector a = s.gaussian(4), x = s.gaussian(4);
    CHECK(gap(reflect_hyperplane(a, reflect_hyperplane(a, x)), x) <= 1e-14 * (1.0 + x.norm()));
  }
}

TEST_CASE("reflection through the center") {
  const CenterContext ctx(vec({2, 0, 0}), 2);
  CHECK(gap(reflect_through_center(ctx, vec({1, 0, 0})), vec({-1, 0, 0})) <= 1e-15);
  const Vector tangent = vec({0.5, std::sqrt(3.0) / 2, 0});
  CHECK(gap(reflect_through_center(ctx, tangent), tangent) <= 1e-15);
  Sampler s(5);
  for (int i = 0; i < 10000; ++i) {
    const CenterContext c(s.on_sphere(3) * s.between(1.05, 8.0), 2);
    const Vector x = s.on_sphere(3);
    const Vector t = reflect_through_center(c, x);
    const Vector conj = mobius(c.a_star(), reflect_hyperplane(c.a(), mobius(c.a_star(), x)));
    CHECK(gap(t, conj) <= 1e-12);
    CHECK(gap(reflect_through_center(c, t), x) <= 1e-11);
    CHECK(std::abs(t.norm() - 1.0) <= 1e-13);
  }
}

TEST_CASE("plane bijection on coordinate planes") {
  const CenterContext ctx(vec({2, 0, 0}), 2);
  SUBCASE("plane x3 = 0 is invariant") {
    const ParallelPlane p = central_to_parallel(ctx, CentralPlane(StiefelFrame(Vector::Unit(3, 2)), ctx.a()));
    CHECK(std::abs(std::abs(p.normal().columns()(2, 0)) - 1.0) <= 1e-15);
    CHECK(std::abs(p.offset()[0]) <= 1e-15);
  }
  SUBCASE("normal orthogonal to a") {
    const ParallelPlane p = central_to_parallel(ctx, CentralPlane(StiefelFrame(Vector::Unit(3, 1)), ctx.a()));
    CHECK(std::abs(std::abs(p.normal().columns()(1, 0)) - 1.0) <= 1e-15);
    CHECK(std::abs(p.offset()[0]) <= 1e-15);
  }
  SUBCASE("t = 0 maps back to a plane through a and the origin") {
    const Vector a = vec({0, 0, 2});
    const CenterContext c(a, 2);
    const StiefelFrame eta(vec({0.6, 0.8, 0}));
    const CentralPlane back = parallel_to_central(c, ParallelPlane(eta, a, vec({0.0})));
    CHECK((back.normal().projector() - eta.projector()).norm() <= 1e-14);
  }
}

TEST_CASE("plane bijection on random planes") {
  Sampler s(6);
  const SectionRule rule;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2;
    const int k = n == 2 ? 2 : 2 + (trial / 2) % 2;
    const CenterContext ctx(s.on_sphere(n + 1) * std::vector<double>{1.5, 2.0, 5.0}[trial % 3], k);
    const CentralPlane tau = random_central(s, ctx.a(), n + 1 - k);
    const ParallelPlane zeta = central_to_parallel(ctx, tau);
    for (int j = 0; j < zeta.normal().size(); ++j) {
      CHECK(std::abs(zeta.normal().columns().col(j).dot(ctx.a())) <= 1e-12 * ctx.norm());
    }
    const SectionNodes nodes = sphere_section_nodes(tau, rule);
    for (Eigen::Index i = 0; i < nodes.nodes.cols(); i += nodes.nodes.cols() / 20) {
      CHECK(zeta.affine().residual(mobius(ctx.a_star(), nodes.nodes.col(i))) <= 1e-11);
    }
    const SectionNodes back_nodes = sphere_section_nodes(zeta, rule);
    for (Eigen::Index i = 0; i < back_nodes.nodes.cols(); i += back_nodes.nodes.cols() / 20) {
      CHECK(tau.affine().residual(mobius(ctx.a_star(), back_nodes.nodes.col(i))) <= 1e-11);
    }
    const CentralPlane round = parallel_to_central(ctx, zeta);
    CHECK((round.normal().projector() - tau.normal().projector()).norm() <= 1e-11);
  }
}

TEST_CASE("multiplier M") {
  const CenterContext ctx(vec({2, 0, 0}), 2);
  const ScalarField one = [](PointRef) { return 1.0; };
  CHECK(multiplier_M(ctx, one)(vec({0, 1, 0})) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));

  Sampler s(7);
  const ScalarField f = bumps(2, 7);
  const CenterContext k1(vec({0, 3, 0}), 1);
  for (int i = 0; i < 100; ++i) {
    const Vector y = s.on_sphere(3);
    CHECK(multiplier_M(k1, f)(y) == doctest::Approx(f(mobius(k1.a_star(), y))).epsilon(1e-15));
    CHECK(multiplier_M_inverse(k1, f)(y) == doctest::Approx(f(mobius(k1.a_star(), y))).epsilon(1e-15));
  }
  const Vector toward = ctx.a_star().normalized();
  const double v = multiplier_M_inverse(ctx, one)(toward);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + i % 2;
    const CenterContext c(s.on_sphere(4) * s.between(1.2, 5.0), k);
    const ScalarField g = bumps(3, 100 + i);
    const Vector y = s.on_sphere(4);
    const double want = g(y);
    CHECK(std::abs(multiplier_M_inverse(c, multiplier_M(c, g))(y) - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("weight rho") {
  const CenterContext ctx(vec({2, 0, 0}), 2);
  CHECK(weight_rho(ctx, vec({1, 0, 0})) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(weight_rho(ctx, vec({-1, 0, 0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  Sampler s(8);
  for (int i = 0; i < 1000; ++i) {
    const CenterContext c(s.on_sphere(4) * s.between(1.1, 6.0), 2 + i % 2);
    const Vector x = s.on_sphere(4);
    CHECK(std::abs(weight_rho(c, x) - weight_rho_mobius_form(c, x)) <= 1e-12 * weight_rho(c, x));
    CHECK(std::abs(weight_rho(c, x) * weight_rho(c, reflect_through_center(c, x)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("involution W") {
  const CenterContext ctx(vec({2, 0, 0}), 2);
  const ScalarField one = [](PointRef) { return 1.0; };
  CHECK(involution_W(ctx, one)(vec({1, 0, 0})) == doctest::Approx(3.0).epsilon(1e-15));
  Sampler s(9);
  for (int i = 0; i < 100; ++i) {
    const CenterContext c(s.on_sphere(3) * s.between(1.1, 6.0), 2);
    const ScalarField f = bumps(2, 200 + i);
    const ScalarField ww = involution_W(c, involution_W(c, f));
    for (int j = 0; j < 100; ++j) {
      const Vector x = s.on_sphere(3);
      CHECK(std::abs(ww(x) - f(x)) <= 1e-11);
    }
  }
}

TEST_CASE("W symmetrizer") {
  Sampler s(10);
  const CenterContext ctx(vec({0, 0, 2}), 2);
  const ScalarField g = bumps(2, 11);
  const ScalarField even = symmetrize_W(ctx, g, +1);
  const ScalarField odd = symmetrize_W(ctx, g, -1);
  const ScalarField even_again = symmetrize_W(ctx, even, +1);
  const ScalarField odd_to_even = symmetrize_W(ctx, odd, +1);
  const ScalarField w_even = involution_W(ctx, even);
  for (int i = 0; i < 500; ++i) {
    const Vector x = s.on_sphere(3);
    CHECK(std::abs(even_again(x) - even(x)) <= 1e-11);
    CHECK(std::abs(odd_to_even(x)) <= 1e-11);
    CHECK(std::abs(w_even(x) - even(x)) <= 1e-11);
    CHECK(std::abs(even(x) + odd(x) - g(x)) <= 1e-14);
  }
}

TEST_CASE("parity parts") {
  const Vector a = vec({0, 0, 2});
  const ScalarField even = [](PointRef x) { return 1.0 + x[2] * x[2] + x[0]; };
  const ParityParts pe = parity_parts(a, even);
  const ScalarField linear = [&](PointRef x) { return x.dot(a.normalized()); };
  const ParityParts pl = parity_parts(a, linear);
  Sampler s(12);
  const ScalarField g = bumps(2, 12);
  const ParityParts pg = parity_parts(a, g);
  for (int i = 0; i < 500; ++i) {
    const Vector x = s.on_sphere(3);
    CHECK(std::abs(pe.plus(x) - even(x)) <= 1e-15);
    CHECK(std::abs(pe.minus(x)) <= 1e-15);
    CHECK(std::abs(pl.plus(x)) <= 1e-15);
    CHECK(std::abs(pl.minus(x) - linear(x)) <= 1e-15);
    const Vector rx = reflect_hyperplane(a, x);
    CHECK(std::abs(pg.plus(x) + pg.minus(x) - g(x)) <= 1e-14);
    CHECK(std::abs(pg.plus(rx) - pg.plus(x)) <= 1e-14);
    CHECK(std::abs(pg.minus(rx) + pg.minus(x)) <= 1e-14);
  }
}

TEST_CASE("measure change under the Kelvin map") {
  const SphereRule rule = fine_rule(100, 100);
  const ScalarField one = [](PointRef) { return 1.0; };
  SUBCASE("constant") {
    const CenterContext ctx(vec({0, 0, 2}), 2);
    const MeasureChange mc = measure_change(ctx, one, rule);
    CHECK(mc.direct == doctest::Approx(4 * std::acos(-1.0)).epsilon(1e-12));
    CHECK(measure_change_residual(ctx, one, rule) <= 1e-8);
  }
  SUBCASE("far center") {
    const CenterContext ctx(vec({0, 1e3, 0}), 2);
    CHECK(measure_change_residual(ctx, one, rule) <= 1e-8);
  }
  SUBCASE("smooth bumps") {
    Sampler s(13);
    for (int i = 0; i < 3; ++i) {
      const CenterContext ctx(s.on_sphere(3) * s.between(1.5, 4.0), 2);
      CHECK(measure_change_residual(ctx, bumps(2, 300 + i), rule) <= 1e-6);
    }
  }
}
