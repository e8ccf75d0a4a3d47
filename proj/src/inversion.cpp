#include "funkslice/inversion.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/parallel.hpp"

#include <cmath>
#include <memory>
#include <limits>
#include <string>

namespace funkslice {

namespace {

constexpr double kEquatorGuard = 1e-10;

void require_hyperplane_slices(const SectionProfile& p, TransformKind kind, const char* what) {
  if (p.setup.transform != kind) {
    throw ConfigError(std::string(what) + ": profile holds the wrong transform");
  }
  if (p.lattice.kind != "angle_offset" || p.setup.dim != 2 || p.setup.section_dim != 2) {
    throw UnsupportedError(std::string(what) + ": needs an angle_offset profile with n = k = 2");
  }
}

}  // namespace

Matrix slice_basis(const Vector& a) {
  if (!(a.norm() > 0.0)) {
    throw DomainError("slice_basis: zero direction");
  }
  const StiefelFrame axis(a.normalized(), 1e-12);
  return complete_frame(axis).leftCols(a.size() - 1);
}

HyperplaneData slice_radon_data(const Vector& a, ParallelData g) {
  const Matrix basis = slice_basis(a);
  return [basis, g = std::move(g)](PointRef omega, double p) {
    if (!(std::abs(p) < 1.0)) {
      return 0.0;
    }
    const Vector eta = basis * omega;
    const Vector t = Vector::Constant(1, p);
    return g(eta, t) / std::sqrt((1.0 - p) * (1.0 + p));
  };
}

HyperplaneData slice_radon_data(const SectionProfile& slice_profile) {
  require_hyperplane_slices(slice_profile, TransformKind::ParallelSlice, "slice_radon_data");
  auto interp = std::make_shared<AngleOffsetInterpolant>(slice_profile);
  return [interp](PointRef omega, double p) {
    return interp->normalized(std::atan2(omega(1), omega(0)), p);
  };
}

SliceInversion slice_invert(const Vector& a, const HyperplaneData& phi, PointRef x,
                            const RadonInversionSpec& spec) {
  if (x.size() != a.size()) {
    throw DomainError("slice_invert: point and direction dimensions differ");
  }
  SliceInversion out;
  const double h = x.dot(a) / a.norm();
  if (std::abs(h) < kEquatorGuard) {
    out.equator = true;
    return out;
  }
  const Vector z = slice_basis(a).transpose() * x;
  RadonInversionSpec local = spec;
  local.op.d = static_cast<int>(z.size()) - 1;
  const RadonInversion r = radon_invert(phi, z, local);
  out.value = 0.5 * std::abs(h) * r.value;
  out.clamped = r.clamped;
  return out;
}

SliceInversion slice_invert(const Vector& a, const ParallelData& g, PointRef x,
                            const RadonInversionSpec& spec) {
  return slice_invert(a, slice_radon_data(a, g), x, spec);
}

HyperplaneData funk_radon_data(const CenterContext& ctx, CentralData g) {
  ctx.require_exterior("funk_radon_data");
  const Matrix basis = slice_basis(ctx.a());
  return [ctx, basis, g = std::move(g)](PointRef omega, double p) {
    if (!(std::abs(p) < 1.0)) {
      return 0.0;
    }
    const ParallelPlane zeta(StiefelFrame(basis * omega, 1e-10), ctx.a(), Vector::Constant(1, p));
    const CentralPlane tau = parallel_to_central(ctx, zeta);
    return g(tau.normal()) / std::sqrt((1.0 - p) * (1.0 + p));
  };
}

HyperplaneData funk_radon_data(const CenterContext& ctx, const SectionProfile& funk_profile) {
  ctx.require_exterior("funk_radon_data");
  require_hyperplane_slices(funk_profile, TransformKind::Funk, "funk_radon_data");
  if ((funk_profile.setup.center - ctx.a()).norm() > 1e-12 * ctx.norm()) {
    throw ConfigError("funk_radon_data: profile center differs from the inversion center");
  }
  auto interp = std::make_shared<AngleOffsetInterpolant>(funk_profile);
  const double s = ctx.s_a_star();
  const double inv_a2 = 1.0 / ctx.a().squaredNorm();
  // the pulled-back plane keeps the lattice angle and has offset c = -p / q
  return [interp, s, inv_a2](PointRef omega, double p) {
    if (!(std::abs(p) < 1.0)) {
      return 0.0;
    }
    const double q = std::sqrt(s * s + p * p * inv_a2);
    return interp->normalized(std::atan2(omega(1), omega(0)), -p / q) * s / q;
  };
}

namespace {

template <class PointValue>
Reconstruction reconstruct(const SphereGrid& grid, int threads, PointValue value_at) {
  Reconstruction out{GridField{grid, std::vector<double>(grid.size(), 0.0)}, {}, {}, 0};
  std::vector<char> state(grid.size(), 0);  // 1 flagged, 2 equator, 4 clamped
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      const SliceInversion r = value_at(grid.point(i), out.field.values[i]);
      state[i] = static_cast<char>((r.equator ? 2 : 0) | (r.clamped ? 4 : 0));
    } catch (const Error&) {
      out.field.values[i] = std::numeric_limits<double>::quiet_NaN();
      state[i] = 1;
    }
  });
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] & 1) out.flagged.push_back(i);
    if (state[i] & 2) out.equator.push_back(i);
    if (state[i] & 4) ++out.clamped;
  }
  return out;
}

}  // namespace

Reconstruction slice_invert_grid(const Vector& a, const HyperplaneData& phi, const SphereGrid& grid,
                                 const RadonInversionSpec& spec, int threads) {
  if (grid.dim() + 1 != a.size()) {
    throw ConfigError("slice_invert_grid: grid dimension does not match the direction");
  }
  return reconstruct(grid, threads, [&](const Vector& x, double& value) {
    const SliceInversion r = slice_invert(a, phi, x, spec);
    value = r.value;
    return r;
  });
}

Reconstruction funk_invert(const CenterContext& ctx, const HyperplaneData& phi_a,
                           const SphereGrid& grid, const RadonInversionSpec& spec, int threads) {
  ctx.require_exterior("funk_invert");
  if (grid.dim() + 1 != ctx.ambient_dim()) {
    throw ConfigError("funk_invert: grid dimension does not match the center");
  }
  if (ctx.k() != ctx.ambient_dim() - 1) {
    throw UnsupportedError("funk_invert: hyperplane sections (k = n) only");
  }
  const MobiusMap map(ctx.a_star());
  const Vector a_star = ctx.a_star();
  const double lead = std::pow(ctx.s_a_star(), 1 - ctx.k());
  const int power = ctx.k() - 1;
  return reconstruct(grid, threads, [&](const Vector& x, double& value) {
    const Vector y = map(x);
    SliceInversion r = slice_invert(ctx.a(), phi_a, y, spec);
    value = lead * std::pow(1.0 - a_star.dot(y), power) * r.value;
    return r;
  });
}

Reconstruction funk_invert(const CenterContext& ctx, const SectionProfile& funk_profile,
                           const SphereGrid& grid, const RadonInversionSpec& spec, int threads) {
  return funk_invert(ctx, funk_radon_data(ctx, funk_profile), grid, spec, threads);
}

}  // namespace funkslice
