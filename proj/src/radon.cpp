#include "funkslice/radon.hpp"

#include "funkslice/errors.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace funkslice {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre on [0, 1] with cos(pi u), sin(pi u) of each node
struct UnitRule {
  Rule1D gl;
  std::vector<double> cos_pi, sin_pi;
};

const UnitRule& unit_rule(int n) {
  thread_local std::vector<UnitRule> cache;
  if (cache.size() <= static_cast<std::size_t>(n)) {
    cache.resize(static_cast<std::size_t>(n) + 1);
  }
  UnitRule& r = cache[static_cast<std::size_t>(n)];
  if (r.gl.nodes.empty()) {
    r.gl = gauss_legendre(n, 0.0, 1.0);
    for (double u : r.gl.nodes) {
      r.cos_pi.push_back(std::cos(kPi * u));
      r.sin_pi.push_back(std::sin(kPi * u));
    }
  }
  return r;
}

double dual_mean_plane(const HyperplaneData& data, const Vector& x, double t, int nodes) {
  const double r = x.norm();
  double lower = 0.0;  // support is alpha in [lower, 2 pi - lower], alpha = theta - theta_z
  if (r > 0.0) {
    const double lim = (1.0 - t) / r;
    if (lim <= -1.0) {
      return 0.0;
    }
    lower = lim >= 1.0 ? 0.0 : std::acos(lim);
  } else if (t >= 1.0) {
    return 0.0;
  }
  const UnitRule& ur = unit_rule(nodes);
  const double half = kPi - lower;
  const double cz = r > 0.0 ? x(0) / r : 1.0, sz = r > 0.0 ? x(1) / r : 0.0;
  Eigen::Vector2d omega;
  double sum = 0.0;
  for (std::size_t i = 0; i < ur.gl.nodes.size(); ++i) {
    const double alpha = kPi - half * ur.cos_pi[i];
    const double jac = half * kPi * ur.sin_pi[i];
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    omega << cz * ca - sz * sa, sz * ca + cz * sa;
    sum += ur.gl.weights[i] * jac * data(omega, r * ca + t);
  }
  return sum / (2.0 * kPi);
}

double dual_mean_space(const HyperplaneData& data, const Vector& x, double t, int nodes) {
  const double r = x.norm();
  Eigen::Vector3d axis(0.0, 0.0, 1.0);
  if (r > 0.0) {
    axis = x / r;
  }
  double upper = 1.0;
  if (r > 0.0) {
    const double lim = (1.0 - t) / r;
    if (lim <= -1.0) {
      return 0.0;
    }
    upper = std::min(1.0, lim);
  } else if (t >= 1.0) {
    return 0.0;
  }
  const Matrix basis = complete_frame(StiefelFrame(Matrix(axis), 1e-12));
  const Eigen::Vector3d e1 = basis.col(0);
  const Eigen::Vector3d e2 = basis.col(1);
  const UnitRule& ur = unit_rule(nodes);
  const Rule1D& gl = ur.gl;
  const double mid = 0.5 * (upper - 1.0);
  const double half = 0.5 * (upper + 1.0);
  const int azimuth = 2 * nodes;
  Eigen::Vector3d omega;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double c = mid - half * ur.cos_pi[i];
    const double jac = half * kPi * ur.sin_pi[i];
    const double sc = std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
    const double p = r * c + t;
    double ring = 0.0;
    for (int q = 0; q < azimuth; ++q) {
      const double beta = 2.0 * kPi * q / azimuth;
      omega = c * axis + sc * (std::cos(beta) * e1 + std::sin(beta) * e2);
      ring += data(omega, p);
    }
    sum += gl.weights[i] * jac * ring / azimuth;
  }
  return 0.5 * sum;
}

}  // namespace

HyperplaneData hyperplane_data(const SectionProfile& radon_profile) {
  if (radon_profile.setup.transform != TransformKind::RadonJohn || radon_profile.setup.dim != 2) {
    throw ConfigError("hyperplane_data: needs a Radon-John profile of lines in R^2");
  }
  auto interp = std::make_shared<AngleOffsetInterpolant>(radon_profile);
  return [interp](PointRef omega, double p) {
    return (*interp)(std::atan2(omega(1), omega(0)), p);
  };
}

HyperplaneData hyperplane_data(ScalarField phi, int m, const BallSectionRule& rule) {
  if (m < 2) {
    throw DomainError("hyperplane_data: ambient dimension must be at least 2");
  }
  return [phi = std::move(phi), m, rule](PointRef omega, double p) {
    if (omega.size() != m) {
      throw DomainError("hyperplane_data: normal has the wrong dimension");
    }
    if (!(std::abs(p) < 1.0)) {
      return 0.0;
    }
    const StiefelFrame normal(Matrix(omega), 1e-10);
    const EuclideanPlane plane(StiefelFrame(orthonormal_complement(normal)), p * Vector(omega));
    return radon_john(phi, plane, rule);
  };
}

double dual_mean(const HyperplaneData& data, const Vector& x, double t, int angular_nodes) {
  if (t < 0.0) {
    throw DomainError("dual_mean: distance must be non-negative");
  }
  if (angular_nodes < 2) {
    throw DomainError("dual_mean: need at least two angular nodes");
  }
  if (!(x.norm() < 1.0)) {
    throw DomainError("dual_mean: point must lie in the open unit ball");
  }
  switch (x.size()) {
    case 2:
      return dual_mean_plane(data, x, t, angular_nodes);
    case 3:
      return dual_mean_space(data, x, t, angular_nodes);
    default:
      throw UnsupportedError("dual_mean: hyperplanes in R^2 and R^3 only");
  }
}

double dual_mean_uniform(const HyperplaneData& data, const Vector& x, double t, int directions) {
  if (x.size() != 2) {
    throw UnsupportedError("dual_mean_uniform: lines in R^2 only");
  }
  Eigen::Vector2d omega;
  double sum = 0.0;
  for (int i = 0; i < directions; ++i) {
    const double theta = 2.0 * kPi * (i + 0.5) / directions;
    omega << std::cos(theta), std::sin(theta);
    sum += data(omega, omega.dot(x) + t);
  }
  return sum / directions;
}

RadialProfile dual_mean_profile(const HyperplaneData& data, const Vector& x, int radial_nodes,
                                int angular_nodes) {
  const double r = x.norm();
  std::vector<double> breaks = r > 1e-12 ? std::vector<double>{0.0, 1.0 - r, 1.0 + r}
                                         : std::vector<double>{0.0, 1.0};
  return RadialProfile(std::move(breaks), radial_nodes,
                       [&](double t) { return dual_mean(data, x, t, angular_nodes); });
}

RadonInversion radon_invert(const HyperplaneData& data, const Vector& x,
                            const RadonInversionSpec& spec) {
  const int m = static_cast<int>(x.size());
  if (m != 2 && m != 3) {
    throw UnsupportedError("radon_invert: hyperplane data in R^2 or R^3 only");
  }
  if (spec.op.d != m - 1) {
    throw UnsupportedError("radon_invert: plane dimension must be m - 1");
  }
  if (spec.t_levels < 2 || !(spec.t_min > 0.0)) {
    throw ConfigError("radon_invert: need t_min > 0 and at least two levels");
  }
  RadonInversion out;
  Vector z = x;
  double r = z.norm();
  if (!(r < 1.0 - spec.boundary_clamp)) {
    if (r > 0.0) {
      z *= (1.0 - spec.boundary_clamp) / r;
    }
    r = 1.0 - spec.boundary_clamp;
    out.clamped = true;
  }
  const double gap = 1.0 - r;
  const double t_min = std::min(spec.t_min, gap / 16.0);
  const double scale = std::pow(kPi, -0.5 * spec.op.d);

  for (int j = 0; j < spec.t_levels; ++j) {
    out.t.push_back(t_min * std::ldexp(1.0, j));
  }
  if (spec.op.even()) {
    auto f = [&](double t) { return dual_mean(data, z, t, spec.angular_nodes); };
    for (double t : out.t) {
      out.samples.push_back(scale * ek_derivative_even_at(spec.op, f, t));
    }
  } else {
    const RadialProfile profile = dual_mean_profile(data, z, spec.radial_nodes, spec.angular_nodes);
    for (double t : out.t) {
      out.samples.push_back(scale * ek_derivative_at(spec.op, profile, t));
    }
  }

  // least squares in powers of t^2 (at most quadratic), leaving one residual dof
  const int levels = spec.t_levels;
  const int basis = std::min(3, levels - 1);
  Matrix a(levels, basis);
  Vector b(levels);
  for (int i = 0; i < levels; ++i) {
    const double s = out.t[static_cast<std::size_t>(i)] / out.t.back();
    double pw = 1.0;
    for (int k = 0; k < basis; ++k) {
      a(i, k) = pw;
      pw *= s * s;
    }
    b(i) = out.samples[static_cast<std::size_t>(i)];
  }
  const Vector coef = a.colPivHouseholderQr().solve(b);
  out.value = coef(0);
  out.fit_residual = (a * coef - b).norm() / std::sqrt(static_cast<double>(levels));
  if (!std::isfinite(out.value) || out.fit_residual > spec.fit_tolerance * (1.0 + std::abs(out.value))) {
    throw AccuracyError("radon_invert: t -> 0 extrapolation unstable (fit residual " +
                        std::to_string(out.fit_residual) + ")");
  }
  return out;
}

}  // namespace funkslice
