#include "funkslice/profile.hpp"

#include "funkslice/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

namespace funkslice {

namespace {

constexpr double kPi = std::numbers::pi;

// 4-point Lagrange weights for nodes -1, 0, 1, 2 at fractional position u.
std::array<double, 4> cubic_weights(double u) {
  return {-u * (u - 1.0) * (u - 2.0) / 6.0, (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
          -(u + 1.0) * u * (u - 2.0) / 2.0, (u + 1.0) * u * (u - 1.0) / 6.0};
}

int section_exponent(const TransformSetup& s) {
  switch (s.transform) {
    case TransformKind::Funk:
    case TransformKind::ParallelSlice:
      return s.section_dim - 1;
    case TransformKind::RadonJohn:
      return s.section_dim;
    case TransformKind::FunkNormalized:
      return 0;
  }
  return 0;
}

bool angle_offset_supported(const TransformSetup& s) {
  if (s.normal_size() != 1) {
    return false;
  }
  if (s.transform == TransformKind::RadonJohn) {
    return s.dim == 2;
  }
  return s.dim == 2 && s.center.size() == 3;
}

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  // fill column-major so the stream order is fixed by the shape alone
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g.data()[i] = normal(rng);
  }
  return g;
}

Vector point_in_ball(std::mt19937_64& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector v(dim);
  for (;;) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      v(i) = uniform(rng);
    }
    if (v.squaredNorm() < 1.0) {
      return v;
    }
  }
}

std::vector<LatticePlane> random_lattice(const TransformSetup& setup, const LatticeSpec& spec) {
  const int dim = setup.ambient_dim();
  const int cols = setup.normal_size();
  std::mt19937_64 rng(spec.seed);
  std::vector<LatticePlane> planes;
  planes.reserve(static_cast<std::size_t>(spec.count));
  constexpr int kMaxAttempts = 100000;
  for (int i = 0; i < spec.count; ++i) {
    LatticePlane p;
    p.index = {i};
    switch (setup.transform) {
      case TransformKind::Funk:
      case TransformKind::FunkNormalized: {
        int attempts = 0;
        for (;;) {
          p.normal = polar_factor(gaussian_matrix(rng, dim, cols)).orthonormal;
          p.offset = p.normal.transpose() * setup.center;
          if (p.offset.squaredNorm() < 1.0) {
            break;
          }
          if (++attempts > kMaxAttempts) {
            throw ConfigError("random lattice: center too far out to draw planes meeting the ball");
          }
        }
        break;
      }
      case TransformKind::ParallelSlice: {
        const Vector u = setup.center.normalized();
        Matrix g = gaussian_matrix(rng, dim, cols);
        g -= u * (u.transpose() * g);
        Matrix eta = polar_factor(g).orthonormal;
        eta -= u * (u.transpose() * eta);
        p.normal = std::move(eta);
        p.offset = point_in_ball(rng, cols);
        break;
      }
      case TransformKind::RadonJohn:
        p.normal = polar_factor(gaussian_matrix(rng, dim, cols)).orthonormal;
        p.offset = point_in_ball(rng, cols);
        break;
    }
    planes.push_back(std::move(p));
  }
  return planes;
}

}  // namespace

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Funk:
      return "funk";
    case TransformKind::ParallelSlice:
      return "slice";
    case TransformKind::RadonJohn:
      return "radon";
    case TransformKind::FunkNormalized:
      return "funk-normalized";
  }
  return "unknown";
}

TransformKind parse_transform(const std::string& name) {
  if (name == "funk") return TransformKind::Funk;
  if (name == "slice") return TransformKind::ParallelSlice;
  if (name == "radon") return TransformKind::RadonJohn;
  if (name == "funk-normalized") return TransformKind::FunkNormalized;
  throw ConfigError("unknown transform '" + name + "'");
}

std::size_t LatticeSpec::size() const {
  if (kind == "angle_offset") {
    return static_cast<std::size_t>(angles) * static_cast<std::size_t>(offsets);
  }
  if (kind == "random") {
    return static_cast<std::size_t>(count);
  }
  return 0;
}

double chebyshev_node(int j, int count) { return std::cos((j + 0.5) * kPi / count); }

int TransformSetup::ambient_dim() const {
  return transform == TransformKind::RadonJohn ? dim : dim + 1;
}

int TransformSetup::normal_size() const {
  return transform == TransformKind::RadonJohn ? dim - section_dim : dim + 1 - section_dim;
}

Matrix lattice_rotation_plane(const TransformSetup& setup) {
  if (!angle_offset_supported(setup)) {
    throw UnsupportedError(
        "angle_offset lattice: needs hyperplane sections of S^2 or lines in R^2");
  }
  if (setup.transform == TransformKind::RadonJohn) {
    return Matrix::Identity(2, 2);
  }
  const StiefelFrame axis(setup.center.normalized(), 1e-12);
  return complete_frame(axis).leftCols(2);
}

std::vector<LatticePlane> enumerate_lattice(const TransformSetup& setup, const LatticeSpec& spec) {
  const int dim = setup.ambient_dim();
  if (setup.section_dim < 1 || setup.normal_size() < 1) {
    throw ConfigError("lattice: section dimension out of range");
  }
  if (setup.transform != TransformKind::RadonJohn && setup.center.size() != dim) {
    throw ConfigError("lattice: center dimension does not match n + 1");
  }
  if (spec.kind == "random") {
    if (spec.count < 1) {
      throw ConfigError("random lattice: count must be positive");
    }
    return random_lattice(setup, spec);
  }
  if (spec.kind != "angle_offset") {
    throw ConfigError("unknown lattice kind '" + spec.kind + "'");
  }
  if (spec.angles < 1 || spec.offsets < 1) {
    throw ConfigError("angle_offset lattice: angles and offsets must be positive");
  }
  const bool funk = setup.transform == TransformKind::Funk ||
                    setup.transform == TransformKind::FunkNormalized;
  const Matrix plane = lattice_rotation_plane(setup);
  double a_norm = 0.0;
  Vector a_hat;
  if (setup.transform != TransformKind::RadonJohn) {
    a_norm = setup.center.norm();
    a_hat = setup.center / a_norm;
    if (funk && !(a_norm > 1.0)) {
      throw ConfigError("angle_offset lattice for F_a needs |a| > 1");
    }
  }
  std::vector<LatticePlane> planes;
  planes.reserve(spec.size());
  for (int i = 0; i < spec.angles; ++i) {
    const double theta = kPi * i / spec.angles;
    const Vector dir = std::cos(theta) * plane.col(0) + std::sin(theta) * plane.col(1);
    for (int j = 0; j < spec.offsets; ++j) {
      const double c = chebyshev_node(j, spec.offsets);
      LatticePlane p;
      p.index = {i, j};
      if (funk) {
        const double q = c / a_norm;
        p.normal = std::sqrt((1.0 - q) * (1.0 + q)) * dir + q * a_hat;
      } else {
        p.normal = dir;
      }
      p.offset = Vector::Constant(1, c);
      planes.push_back(std::move(p));
    }
  }
  return planes;
}

double evaluate_transform(const TransformSetup& setup, const ScalarField& f,
                          const LatticePlane& plane, const SectionRule& rule,
                          const BallSectionRule& ball_rule) {
  switch (setup.transform) {
    case TransformKind::Funk:
      return funk_transform(f, CentralPlane(StiefelFrame(plane.normal, 1e-10), setup.center), rule);
    case TransformKind::ParallelSlice:
      return parallel_slice_transform(
          f, ParallelPlane(StiefelFrame(plane.normal, 1e-10), setup.center, plane.offset), rule);
    case TransformKind::RadonJohn: {
      const StiefelFrame normal(plane.normal, 1e-10);
      const EuclideanPlane section(StiefelFrame(orthonormal_complement(normal)),
                                   plane.normal * plane.offset);
      return radon_john(f, section, ball_rule);
    }
    case TransformKind::FunkNormalized:
      return funk_normalized(f, StiefelFrame(plane.normal, 1e-10), setup.center, rule);
  }
  throw UnsupportedError("evaluate_transform: unknown transform");
}

SectionProfile profile_sweep(const TransformSetup& setup, const ScalarField& f,
                             const SectionGrid& grid, int threads) {
  const std::vector<LatticePlane> planes = enumerate_lattice(setup, grid.lattice);
  SectionProfile out;
  out.setup = setup;
  out.lattice = grid.lattice;
  out.rule = grid.rule;
  out.ball_rule = grid.ball_rule;
  out.values.assign(planes.size(), 0.0);
  std::vector<char> failed(planes.size(), 0);
  parallel_for(planes.size(), threads, [&](std::size_t i) {
    try {
      out.values[i] = evaluate_transform(setup, f, planes[i], grid.rule, grid.ball_rule);
    } catch (const Error&) {
      out.values[i] = std::numeric_limits<double>::quiet_NaN();
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (failed[i]) {
      out.flagged.push_back(i);
    }
  }
  return out;
}

AngleOffsetInterpolant::AngleOffsetInterpolant(const SectionProfile& profile)
    : setup_(profile.setup) {
  if (profile.lattice.kind != "angle_offset") {
    throw UnsupportedError("interpolation needs an angle_offset lattice");
  }
  if (profile.values.size() != profile.lattice.size()) {
    throw DomainError("interpolation: value count does not match the lattice");
  }
  plane_ = lattice_rotation_plane(setup_);
  angles_ = profile.lattice.angles;
  offsets_ = profile.lattice.offsets;
  exponent_ = section_exponent(setup_);
  if (angles_ < 2 || offsets_ < 4) {
    throw DomainError("interpolation: lattice too coarse for cubic interpolation");
  }
  table_.assign(static_cast<std::size_t>(2 * angles_ * offsets_), 0.0);
  for (int j = 0; j < offsets_; ++j) {
    const double c = chebyshev_node(j, offsets_);
    const double w = std::pow((1.0 - c) * (1.0 + c), 0.5 * exponent_);
    for (int i = 0; i < angles_; ++i) {
      const double v = profile.values[static_cast<std::size_t>(i * offsets_ + j)] / w;
      table_[static_cast<std::size_t>(i * offsets_ + j)] = v;
      table_[static_cast<std::size_t>((i + angles_) * offsets_ + (offsets_ - 1 - j))] = v;
    }
  }
}

double AngleOffsetInterpolant::node(int i, int j) const {
  const int period = 2 * angles_;
  i %= period;
  if (i < 0) {
    i += period;
  }
  if (j < 0) {
    j = -1 - j;
  } else if (j >= offsets_) {
    j = 2 * offsets_ - 1 - j;
  }
  return table_[static_cast<std::size_t>(i * offsets_ + j)];
}

double AngleOffsetInterpolant::operator()(double theta, double c) const {
  if (!(std::abs(c) < 1.0)) {
    return 0.0;
  }
  return normalized(theta, c) * std::pow((1.0 - c) * (1.0 + c), 0.5 * exponent_);
}

double AngleOffsetInterpolant::normalized(double theta, double c) const {
  if (!(std::abs(c) < 1.0)) {
    return 0.0;
  }
  const double psi = std::acos(c);
  const double x = theta * angles_ / kPi;
  const double y = psi * offsets_ / kPi - 0.5;
  const double xf = std::floor(x);
  const double yf = std::floor(y);
  const int i0 = static_cast<int>(xf);
  const int j0 = static_cast<int>(yf);
  const auto wx = cubic_weights(x - xf);
  const auto wy = cubic_weights(y - yf);
  if (j0 < 1 || j0 + 2 >= offsets_) {
    double sum = 0.0;
    for (int p = 0; p < 4; ++p) {
      double row = 0.0;
      for (int q = 0; q < 4; ++q) {
        row += wy[q] * node(i0 - 1 + p, j0 - 1 + q);
      }
      sum += wx[p] * row;
    }
    return sum;
  }
  // interior offsets: only the angle index wraps
  const int period = 2 * angles_;
  int i = (i0 - 1) % period;
  if (i < 0) i += period;
  double sum = 0.0;
  for (int p = 0; p < 4; ++p) {
    const double* col = &table_[static_cast<std::size_t>(i * offsets_ + j0 - 1)];
    sum += wx[p] * (wy[0] * col[0] + wy[1] * col[1] + wy[2] * col[2] + wy[3] * col[3]);
    if (++i == period) i = 0;
  }
  return sum;
}

CentralData central_data(const SectionProfile& profile) {
  if (profile.setup.transform != TransformKind::Funk) {
    throw ConfigError("central_data: profile is not an F_a profile");
  }
  auto interp = std::make_shared<AngleOffsetInterpolant>(profile);
  const Vector a = profile.setup.center;
  return [interp, a](const StiefelFrame& xi) {
    if (xi.size() != 1) {
      throw UnsupportedError("central_data: only hyperplane frames are interpolated");
    }
    const auto col = xi.columns().col(0);
    const Matrix& b = interp->rotation_plane();
    const double theta = std::atan2(col.dot(b.col(1)), col.dot(b.col(0)));
    return (*interp)(theta, col.dot(a));
  };
}

ParallelData parallel_data(const SectionProfile& profile) {
  if (profile.setup.transform != TransformKind::ParallelSlice) {
    throw ConfigError("parallel_data: profile is not a Pi_a profile");
  }
  auto interp = std::make_shared<AngleOffsetInterpolant>(profile);
  return [interp](const Eigen::Ref<const Matrix>& eta, const Eigen::Ref<const Vector>& t) {
    if (eta.cols() != 1 || t.size() != 1) {
      throw UnsupportedError("parallel_data: only hyperplane frames are interpolated");
    }
    const Matrix& b = interp->rotation_plane();
    const double theta = std::atan2(eta.col(0).dot(b.col(1)), eta.col(0).dot(b.col(0)));
    return (*interp)(theta, t(0));
  };
}

}  // namespace funkslice
