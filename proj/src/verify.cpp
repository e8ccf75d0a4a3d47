#include "funkslice/verify.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/profile.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

namespace funkslice {

namespace {

using Rng = std::mt19937_64;

Vector gaussian_vector(Rng& rng, int dim) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

Vector unit_vector(Rng& rng, int dim) {
  Vector v;
  do {
    v = gaussian_vector(rng, dim);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

Vector ball_point(Rng& rng, int dim, double radius = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return unit_vector(rng, dim) * radius * std::pow(u(rng), 1.0 / dim);
}

StiefelFrame gaussian_frame(Rng& rng, int dim, int size) {
  Matrix m(dim, size);
  for (int j = 0; j < size; ++j) m.col(j) = gaussian_vector(rng, dim);
  return StiefelFrame::orthonormalize(m);
}

/// Random plane through a that meets the open ball (rejection on |xi'a| < 1).
CentralPlane random_central_plane(Rng& rng, const Vector& a, int k) {
  const int dim = static_cast<int>(a.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    StiefelFrame xi = gaussian_frame(rng, dim, dim - k);
    if ((xi.columns().transpose() * a).norm() < 0.98) {
      return CentralPlane(std::move(xi), a);
    }
  }
  throw ConfigError("no central plane meeting the ball could be drawn");
}

ScalarField smooth_phantom(int n, int bumps, std::uint64_t seed) {
  return gaussian_sum(random_bumps(n, bumps, seed));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_detail(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

double tolerance_for(const VerifySettings& s, const std::string& name) {
  const auto it = s.tolerances.find(name);
  return it == s.tolerances.end() ? default_tolerance(name) : it->second;
}

CheckResult finish(const VerifySettings& s, const std::string& name, double residual,
                   std::chrono::steady_clock::time_point t0, std::string detail = {}) {
  CheckResult r;
  r.name = name;
  r.residual = residual;
  r.tolerance = tolerance_for(s, name);
  r.passed = std::isfinite(residual) && residual <= r.tolerance;
  r.runtime_seconds = seconds_since(t0);
  r.detail = std::move(detail);
  return r;
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{
      "mobius",          "mobius-involution", "plane-bijection", "conjugation",
      "involution",      "factorization",     "kernels",         "slice-reduction",
      "measure-change",  "determinant",       "dimension-link"};
  return names;
}

double default_tolerance(const std::string& check) {
  static const std::map<std::string, double> table{
      {"mobius", 1e-13},         {"mobius-involution", 1e-11}, {"plane-bijection", 1e-11}, {"conjugation", 1e-11},
      {"involution", 1e-11},     {"factorization", 1e-6},    {"kernels", 5e-7},
      {"slice-reduction", 1e-6}, {"measure-change", 1e-6},   {"determinant", 1e-12},
      {"dimension-link", 1.0}};
  const auto it = table.find(check);
  if (it == table.end()) {
    throw ConfigError("unknown verification check '" + check + "'");
  }
  return it->second;
}

namespace {

struct MobiusResiduals {
  double fixed = 0.0;
  double involution = 0.0;
  double sphere = 0.0;
};

// |b| uniform in (0, 1), x uniform in the ball
MobiusResiduals mobius_residuals(const VerifySettings& s) {
  Rng rng(s.seed);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  const int dim = static_cast<int>(s.center.size());
  MobiusResiduals r;
  for (int i = 0; i < s.mobius_points; ++i) {
    double len = 0.0;
    while (!(len > 0.0)) len = radius(rng);
    const Vector b = unit_vector(rng, dim) * len;
    const MobiusMap phi(b);
    const Vector x = ball_point(rng, dim);
    r.fixed = std::max({r.fixed, (phi(Vector::Zero(dim)) - b).norm(), phi(b).norm()});
    const Vector y = phi(x);
    r.involution = std::max(r.involution, (phi(y) - x).norm());
    const double q = 1.0 - x.dot(b);
    const double rhs = (1.0 - b.squaredNorm()) * (1.0 - x.squaredNorm()) / (q * q);
    r.sphere = std::max(r.sphere, std::abs(1.0 - y.squaredNorm() - rhs));
  }
  return r;
}

}  // namespace

CheckResult check_mobius_identities(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const MobiusResiduals r = mobius_residuals(s);
  return finish(s, "mobius", std::max(r.fixed, r.sphere), t0,
                format_detail("fixed points %.3g, sphere identity %.3g", r.fixed, r.sphere));
}

CheckResult check_mobius_involution(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const MobiusResiduals r = mobius_residuals(s);
  return finish(s, "mobius-involution", r.involution, t0,
                format_detail("|phi(phi x) - x| %.3g over %g points", r.involution, s.mobius_points));
}

CheckResult check_plane_bijection(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(s.seed + 1);
  SectionRule probe;
  probe.circle_nodes = 8;
  probe.polar_nodes = 3;
  probe.azimuth_nodes = 6;
  double image = 0.0, round_trip = 0.0;
  for (int n : {2, 3}) {
    for (int k = 2; k <= std::min(n, 3); ++k) {
      for (double norm : s.bijection_radii) {
        for (int i = 0; i < s.bijection_planes; ++i) {
          const Vector a = unit_vector(rng, n + 1) * norm;
          const CenterContext ctx(a, k);
          const MobiusMap phi(ctx.a_star());
          const CentralPlane tau = random_central_plane(rng, a, k);
          const ParallelPlane zeta = central_to_parallel(ctx, tau);
          const SectionNodes nodes = sphere_section_nodes(tau, probe);
          for (Eigen::Index c = 0; c < nodes.nodes.cols(); ++c) {
            image = std::max(image, zeta.affine().residual(phi(nodes.nodes.col(c))));
          }
          const CentralPlane back = parallel_to_central(ctx, zeta);
          round_trip = std::max(round_trip, plane_distance(back.affine(), tau.affine()));
        }
      }
    }
  }
  return finish(s, "plane-bijection", std::max(image, round_trip), t0,
                format_detail("image points %.3g, round trip %.3g", image, round_trip));
}

CheckResult check_conjugation(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(s.seed + 2);
  const CenterContext ctx(s.center, static_cast<int>(s.center.size()) - 1);
  const MobiusMap phi(ctx.a_star());
  const int dim = ctx.ambient_dim();
  double conj = 0.0, on_sphere = 0.0, collinear = 0.0;
  for (int i = 0; i < s.conjugation_points; ++i) {
    const Vector x = unit_vector(rng, dim);
    const Vector tx = reflect_through_center(ctx, x);
    const Vector composed = phi(reflect_hyperplane(ctx.a(), phi(x)));
    conj = std::max(conj, (tx - composed).norm());
    on_sphere = std::max(on_sphere, std::abs(tx.norm() - 1.0));
    // a, x and tau x on one line: (x - a) and (tau x - a) parallel
    const Vector u = x - ctx.a();
    const Vector v = tx - ctx.a();
    collinear = std::max(collinear, (v - u * (u.dot(v) / u.squaredNorm())).norm());
  }
  return finish(s, "conjugation", std::max({conj, on_sphere, collinear}), t0,
                format_detail("conjugation %.3g, on sphere %.3g, collinearity %.3g", conj,
                              on_sphere, collinear));
}

CheckResult check_involution(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(s.seed + 3);
  const int dim = static_cast<int>(s.center.size());
  const ScalarField f = smooth_phantom(dim - 1, s.phantom_bumps, s.seed + 3);
  double w2 = 0.0, rho = 0.0, tau2 = 0.0, forms = 0.0;
  for (int k = 2; k <= dim - 1; ++k) {
    const CenterContext ctx(s.center, k);
    const ScalarField ww = involution_W(ctx, involution_W(ctx, f));
    for (int i = 0; i < s.conjugation_points; ++i) {
      const Vector x = unit_vector(rng, dim);
      const Vector tx = reflect_through_center(ctx, x);
      w2 = std::max(w2, std::abs(ww(x) - f(x)));
      rho = std::max(rho, std::abs(weight_rho(ctx, x) * weight_rho(ctx, tx) - 1.0));
      tau2 = std::max(tau2, (reflect_through_center(ctx, tx) - x).norm());
      const double w = weight_rho(ctx, x);
      forms = std::max(forms, std::abs(w - weight_rho_mobius_form(ctx, x)) / std::max(1.0, w));
    }
  }
  return finish(s, "involution", std::max({w2, rho, tau2, forms}), t0,
                format_detail("W^2 - I %.3g, rho product %.3g, tau^2 %.3g", w2, rho, tau2) +
                    format_detail(", weight forms %.3g", forms));
}

CheckResult check_factorization(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(s.seed + 4);
  const int dim = static_cast<int>(s.center.size());
  const CenterContext ctx(s.center, dim - 1);
  const ScalarField f = smooth_phantom(dim - 1, s.phantom_bumps, s.seed + 4);
  const ScalarField mf = multiplier_M(ctx, f, MobiusMap(ctx.a_star(), s.map_perturbation));
  SectionRule rule;
  rule.circle_nodes = s.factorization_nodes;
  double worst = 0.0;
  for (int i = 0; i < s.factorization_planes; ++i) {
    const CentralPlane tau = random_central_plane(rng, ctx.a(), ctx.k());
    const double lhs = funk_transform(f, tau, rule);
    const double rhs = parallel_slice_transform(mf, central_to_parallel(ctx, tau), rule);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return finish(s, "factorization", worst, t0,
                format_detail("%g planes at %g section nodes", s.factorization_planes,
                              s.factorization_nodes));
}

CheckResult check_kernels(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = static_cast<int>(s.center.size());
  const int n = dim - 1;
  const auto bumps = random_bumps(n, s.phantom_bumps, s.seed + 5);
  SectionGrid grid;
  grid.lattice = s.kernel_lattice;
  auto sweep_max = [&](TransformKind kind, SymmetryClass symmetry) {
    const TransformSetup setup{kind, n, n, s.center};
    const ScalarField f = make_phantom({bumps, symmetry}, s.center, n);
    const SectionProfile p = profile_sweep(setup, f, grid);
    double worst = p.flagged.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (double v : p.values) worst = std::max(worst, std::abs(v));
    return worst;
  };
  const double funk = sweep_max(TransformKind::Funk, SymmetryClass::WOdd);
  const double slice = sweep_max(TransformKind::ParallelSlice, SymmetryClass::ParityOdd);
  return finish(s, "kernels", std::max(funk, slice), t0,
                format_detail("F on W-odd %.3g, Pi on a-perp-odd %.3g", funk, slice));
}

CheckResult check_slice_reduction(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = static_cast<int>(s.center.size());
  const int n = dim - 1;
  const ScalarField f = smooth_phantom(n, s.phantom_bumps, s.seed + 6);
  const TransformSetup setup{TransformKind::ParallelSlice, n, n, s.center};
  const SectionRule rule;
  const BallSectionRule ball;
  double worst = 0.0;
  for (const LatticePlane& lp : enumerate_lattice(setup, s.reduction_lattice)) {
    const ParallelPlane zeta(StiefelFrame(lp.normal), s.center, lp.offset);
    const double lhs = parallel_slice_transform(f, zeta, rule);
    const double rhs = slice_reduction_rhs(f, zeta, ball);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return finish(s, "slice-reduction", worst, t0,
                format_detail("%g x %g lattice", s.reduction_lattice.angles,
                              s.reduction_lattice.offsets));
}

CheckResult check_measure_change(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = static_cast<int>(s.center.size());
  const CenterContext ctx(s.center, dim - 1);
  SectionRule rule;
  rule.circle_nodes = s.measure_azimuth;
  rule.polar_nodes = s.measure_polar;
  rule.azimuth_nodes = s.measure_azimuth;
  const SphereRule sphere = unit_sphere_rule(dim - 1, rule);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ScalarField f = smooth_phantom(dim - 1, s.phantom_bumps, s.seed + 7 + i);
    const MeasureChange m = measure_change(ctx, f, sphere);
    worst = std::max(worst, m.residual() / std::abs(m.direct));
  }
  return finish(s, "measure-change", worst, t0,
                format_detail("three phantoms, %g-node sphere rule", static_cast<double>(sphere.size())));
}

CheckResult check_determinant(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(s.seed + 10);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int i = 0; i < s.determinant_samples; ++i) {
    Matrix a(4, 2), b(2, 4);
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = normal(rng);
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = normal(rng);
    worst = std::max(worst, det_identity_residual(a, b));
  }
  return finish(s, "determinant", worst, t0,
                format_detail("%g random 4x2 / 2x4 pairs", s.determinant_samples));
}

CheckResult check_dimension_link(const VerifySettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = s.link_n;
  if (!(1 < s.link_k && s.link_k < s.link_ell && s.link_ell <= n)) {
    throw ConfigError("dimension link: need 1 < k < l <= n");
  }
  Rng rng(s.seed + 11);
  const Vector a = Vector::Unit(n + 1, n) * s.center.norm();
  const ScalarField f = smooth_phantom(n, s.phantom_bumps, s.seed + 11);
  const SectionRule rule;
  double worst = 0.0, worst_diff = 0.0;
  int frame = 0;
  while (frame < s.link_frames) {
    const StiefelFrame eta = gaussian_frame(rng, n + 1, n + 1 - s.link_ell);
    if ((eta.columns().transpose() * a).norm() >= 0.98) continue;
    const double lhs = funk_normalized(f, eta, a, rule);
    const LinkEstimate rhs =
        dimension_link_rhs(f, eta, a, s.link_k, s.link_samples, s.seed + 100 + frame, rule);
    const double diff = std::abs(lhs - rhs.mean);
    worst = std::max(worst, diff / std::max(s.link_floor, 3.0 * rhs.standard_error));
    worst_diff = std::max(worst_diff, diff);
    ++frame;
  }
  return finish(s, "dimension-link", worst, t0,
                format_detail("worst |lhs - rhs| %.3g over %g frames, |a| = %g", worst_diff,
                              s.link_frames, a.norm()));
}

CheckResult run_check(const std::string& name, const VerifySettings& s) {
  if (name == "mobius") return check_mobius_identities(s);
  if (name == "mobius-involution") return check_mobius_involution(s);
  if (name == "plane-bijection") return check_plane_bijection(s);
  if (name == "conjugation") return check_conjugation(s);
  if (name == "involution") return check_involution(s);
  if (name == "factorization") return check_factorization(s);
  if (name == "kernels") return check_kernels(s);
  if (name == "slice-reduction") return check_slice_reduction(s);
  if (name == "measure-change") return check_measure_change(s);
  if (name == "determinant") return check_determinant(s);
  if (name == "dimension-link") return check_dimension_link(s);
  throw ConfigError("unknown verification check '" + name + "'");
}

VerificationReport run_verification(const VerifySettings& s) {
  const std::vector<std::string>& names = s.checks.empty() ? verify_check_names() : s.checks;
  std::set<std::string> seen;
  for (const auto& name : names) {
    default_tolerance(name);
    if (!seen.insert(name).second) {
      throw ConfigError("verification check '" + name + "' listed twice");
    }
  }
  VerificationReport report;
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      report.checks.push_back(run_check(name, s));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      CheckResult r = finish(s, name, std::numeric_limits<double>::infinity(), t0, e.what());
      report.checks.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace funkslice
