#include "funkslice/fields.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace funkslice {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vector sphere_point_from_angles(const std::vector<double>& angles) {
  const int n = static_cast<int>(angles.size());
  if (n < 1) {
    throw DomainError("sphere_point_from_angles: need at least the azimuth");
  }
  Vector x(n + 1);
  double prod = 1.0;
  for (int l = 1; l <= n - 1; ++l) {
    const double th = angles[static_cast<std::size_t>(l - 1)];
    x(n + 1 - l) = prod * std::cos(th);
    prod *= std::sin(th);
  }
  const double phi = angles.back();
  x(0) = prod * std::cos(phi);
  x(1) = prod * std::sin(phi);
  return x;
}

std::vector<double> angles_from_sphere_point(PointRef x) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < 1) {
    throw DomainError("angles_from_sphere_point: need a point of R^2 or higher");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int l = 1; l <= n - 1; ++l) {
    const double rest = x.head(n + 1 - l).norm();
    out.push_back(std::atan2(rest, x(n + 1 - l)));
  }
  double phi = std::atan2(x(1), x(0));
  if (phi < 0.0) {
    phi += 2.0 * kPi;
  }
  out.push_back(phi);
  return out;
}

SphereGrid::SphereGrid(int n, int polar, int azimuth) : n_(n), polar_(polar), azimuth_(azimuth) {
  if (n < 1 || polar < 1 || azimuth < 2 || azimuth % 2 != 0) {
    throw ConfigError("SphereGrid: need n >= 1, polar >= 1 and an even azimuth count");
  }
  if (n == 1) {
    polar_ = 1;
  }
  size_ = static_cast<std::size_t>(azimuth_);
  for (int l = 0; l < n_ - 1; ++l) {
    size_ *= static_cast<std::size_t>(polar_);
  }
}

std::vector<int> SphereGrid::multi_index(std::size_t index) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  idx.back() = static_cast<int>(index % static_cast<std::size_t>(azimuth_));
  index /= static_cast<std::size_t>(azimuth_);
  for (int l = n_ - 2; l >= 0; --l) {
    idx[static_cast<std::size_t>(l)] = static_cast<int>(index % static_cast<std::size_t>(polar_));
    index /= static_cast<std::size_t>(polar_);
  }
  return idx;
}

std::size_t SphereGrid::flat(const std::vector<int>& idx) const {
  std::size_t out = 0;
  for (int l = 0; l < n_ - 1; ++l) {
    out = out * static_cast<std::size_t>(polar_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(l)]);
  }
  return out * static_cast<std::size_t>(azimuth_) + static_cast<std::size_t>(idx.back());
}

std::vector<double> SphereGrid::angles(std::size_t index) const {
  const std::vector<int> idx = multi_index(index);
  std::vector<double> out(idx.size());
  for (int l = 0; l < n_ - 1; ++l) {
    out[static_cast<std::size_t>(l)] = (idx[static_cast<std::size_t>(l)] + 0.5) * kPi / polar_;
  }
  out.back() = 2.0 * kPi * idx.back() / azimuth_;
  return out;
}

Vector SphereGrid::point(std::size_t index) const { return sphere_point_from_angles(angles(index)); }

double SphereGrid::weight(std::size_t index) const {
  const std::vector<double> ang = angles(index);
  double w = 2.0 * kPi / azimuth_;
  for (int l = 1; l <= n_ - 1; ++l) {
    w *= std::pow(std::sin(ang[static_cast<std::size_t>(l - 1)]), n_ - l) * kPi / polar_;
  }
  return w;
}

double SphereGrid::node_value(const std::vector<double>& values, std::vector<int> idx) const {
  bool inside = true;
  for (int l = 0; l < n_ - 1; ++l) {
    const int i = idx[static_cast<std::size_t>(l)];
    inside = inside && i >= 0 && i < polar_;
  }
  if (!inside) {
    // ghost node across a pole: locate the grid node at the same point
    std::vector<double> ang(idx.size());
    for (int l = 0; l < n_ - 1; ++l) {
      ang[static_cast<std::size_t>(l)] = (idx[static_cast<std::size_t>(l)] + 0.5) * kPi / polar_;
    }
    ang.back() = 2.0 * kPi * idx.back() / azimuth_;
    const std::vector<double> back = angles_from_sphere_point(sphere_point_from_angles(ang));
    for (int l = 0; l < n_ - 1; ++l) {
      const long i = std::lround(back[static_cast<std::size_t>(l)] * polar_ / kPi - 0.5);
      idx[static_cast<std::size_t>(l)] = static_cast<int>(std::clamp<long>(i, 0, polar_ - 1));
    }
    idx.back() = static_cast<int>(std::lround(back.back() * azimuth_ / (2.0 * kPi)));
  }
  int j = idx.back() % azimuth_;
  if (j < 0) {
    j += azimuth_;
  }
  idx.back() = j;
  return values[flat(idx)];
}

double SphereGrid::interpolate(const std::vector<double>& values, PointRef x) const {
  if (values.size() != size_) {
    throw DomainError("SphereGrid::interpolate: value count does not match the grid");
  }
  if (x.size() != n_ + 1) {
    throw DomainError("SphereGrid::interpolate: point dimension mismatch");
  }
  const std::vector<double> ang = angles_from_sphere_point(x);
  std::vector<int> base(static_cast<std::size_t>(n_));
  std::vector<double> frac(static_cast<std::size_t>(n_));
  for (int l = 0; l < n_; ++l) {
    const double y = l < n_ - 1 ? ang[static_cast<std::size_t>(l)] * polar_ / kPi - 0.5
                                : ang.back() * azimuth_ / (2.0 * kPi);
    const double f = std::floor(y);
    base[static_cast<std::size_t>(l)] = static_cast<int>(f);
    frac[static_cast<std::size_t>(l)] = y - f;
  }
  double sum = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (unsigned corner = 0; corner < (1u << n_); ++corner) {
    double w = 1.0;
    for (int l = 0; l < n_; ++l) {
      const bool up = (corner >> l) & 1u;
      idx[static_cast<std::size_t>(l)] = base[static_cast<std::size_t>(l)] + (up ? 1 : 0);
      w *= up ? frac[static_cast<std::size_t>(l)] : 1.0 - frac[static_cast<std::size_t>(l)];
    }
    if (w != 0.0) {
      sum += w * node_value(values, idx);
    }
  }
  return sum;
}

ScalarField GridField::as_field() const {
  auto self = std::make_shared<GridField>(*this);
  return [self](PointRef x) { return (*self)(x); };
}

GridField sample_field(const SphereGrid& grid, const ScalarField& f, int threads) {
  GridField out{grid, std::vector<double>(grid.size(), 0.0)};
  parallel_for(grid.size(), threads, [&](std::size_t i) { out.values[i] = f(grid.point(i)); });
  return out;
}

FieldError field_error(const SphereGrid& grid, const std::vector<double>& values,
                       const std::vector<double>& truth) {
  if (values.size() != grid.size() || truth.size() != grid.size()) {
    throw DomainError("field_error: value count does not match the grid");
  }
  double num = 0.0;
  double den = 0.0;
  FieldError e;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.weight(i);
    const double diff = values[i] - truth[i];
    num += w * diff * diff;
    den += w * truth[i] * truth[i];
    e.linf = std::max(e.linf, std::abs(diff));
  }
  e.relative_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return e;
}

std::string to_string(SymmetryClass s) {
  switch (s) {
    case SymmetryClass::Generic:
      return "generic";
    case SymmetryClass::ParityEven:
      return "aperp-even";
    case SymmetryClass::ParityOdd:
      return "aperp-odd";
    case SymmetryClass::WEven:
      return "W-even";
    case SymmetryClass::WOdd:
      return "W-odd";
  }
  return "generic";
}

SymmetryClass parse_symmetry(const std::string& name) {
  if (name == "generic") return SymmetryClass::Generic;
  if (name == "aperp-even") return SymmetryClass::ParityEven;
  if (name == "aperp-odd") return SymmetryClass::ParityOdd;
  if (name == "W-even") return SymmetryClass::WEven;
  if (name == "W-odd") return SymmetryClass::WOdd;
  throw ConfigError("unknown symmetry class '" + name + "'");
}

ScalarField gaussian_sum(const std::vector<GaussianBump>& bumps) {
  struct Bump {
    Vector c;
    double inv2w2;
    double amp;
  };
  std::vector<Bump> prepared;
  for (const auto& b : bumps) {
    if (!(b.width > 0.0)) {
      throw ConfigError("gaussian bump: width must be positive");
    }
    prepared.push_back({b.center, 0.5 / (b.width * b.width), b.amplitude});
  }
  return [prepared](PointRef x) {
    double sum = 0.0;
    for (const auto& b : prepared) {
      sum += b.amp * std::exp(-(x - b.c).squaredNorm() * b.inv2w2);
    }
    return sum;
  };
}

ScalarField symmetrize(ScalarField g, SymmetryClass symmetry, const Vector& a, int k) {
  switch (symmetry) {
    case SymmetryClass::Generic:
      return g;
    case SymmetryClass::ParityEven:
      return parity_parts(a, std::move(g)).plus;
    case SymmetryClass::ParityOdd:
      return parity_parts(a, std::move(g)).minus;
    case SymmetryClass::WEven:
    case SymmetryClass::WOdd: {
      const CenterContext ctx(a, k);
      if (!ctx.exterior()) {
        throw ConfigError("W-symmetric phantoms need an exterior center |a| > 1");
      }
      return symmetrize_W(ctx, std::move(g), symmetry == SymmetryClass::WEven ? 1 : -1);
    }
  }
  return g;
}

ScalarField make_phantom(const PhantomSpec& spec, const Vector& a, int k) {
  return symmetrize(gaussian_sum(spec.bumps), spec.symmetry, a, k);
}

std::vector<GaussianBump> random_bumps(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> width(0.35, 0.6);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  std::vector<GaussianBump> out;
  for (int i = 0; i < count; ++i) {
    GaussianBump b;
    b.center.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
      b.center(j) = normal(rng);
    }
    b.center.normalize();
    b.width = width(rng);
    b.amplitude = amp(rng);
    out.push_back(std::move(b));
  }
  return out;
}

double symmetry_residual(const ScalarField& f, SymmetryClass symmetry, const Vector& a, int k,
                         const SphereGrid& grid) {
  if (symmetry == SymmetryClass::Generic) {
    return 0.0;
  }
  ScalarField image;
  double sign = 1.0;
  if (symmetry == SymmetryClass::ParityEven || symmetry == SymmetryClass::ParityOdd) {
    image = [a, f](PointRef x) { return f(reflect_hyperplane(a, x)); };
    sign = symmetry == SymmetryClass::ParityEven ? 1.0 : -1.0;
  } else {
    image = involution_W(CenterContext(a, k), f);
    sign = symmetry == SymmetryClass::WEven ? 1.0 : -1.0;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector x = grid.point(i);
    worst = std::max(worst, std::abs(f(x) - sign * image(x)));
  }
  return worst;
}

}  // namespace funkslice
