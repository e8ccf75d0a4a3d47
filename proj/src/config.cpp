#include "funkslice/config.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/mobius.hpp"

#include <cmath>
#include <initializer_list>
#include <random>
#include <set>

namespace funkslice {

namespace fs = std::filesystem;

namespace {

void allow_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return fallback;
  }
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

Vector vector_or_throw(const Json& j, const std::string& where) {
  try {
    const Vector v = vector_from_json(j);
    if (!v.allFinite()) throw ConfigError("non-finite entry");
    return v;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const Json& obj, const char* key, const char* fallback) {
  const fs::path p = get_or<std::string>(obj, key, fallback, "outputs");
  return p.is_absolute() ? p : base / p;
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

void parse_phantom(const Json& j, ExperimentConfig& c, std::uint64_t seed, bool seed_overridden) {
  allow_keys(j, {"kind", "bumps", "random_bumps", "value", "symmetry"}, "phantom");
  PhantomConfig& p = c.phantom;
  p.kind = get_or<std::string>(j, "kind", "gaussians", "phantom");
  if (p.kind != "gaussians" && p.kind != "constant" && p.kind != "cap") {
    throw ConfigError("phantom.kind: expected gaussians, constant or cap");
  }
  p.value = get_or<double>(j, "value", 1.0, "phantom");
  p.symmetry = parse_symmetry(get_or<std::string>(j, "symmetry", "generic", "phantom"));
  const int ambient = c.sphere_transform() ? c.n + 1 : c.n;
  if (j.contains("bumps")) {
    if (!j["bumps"].is_array()) throw ConfigError("phantom.bumps: expected an array");
    for (const auto& b : j["bumps"]) {
      allow_keys(b, {"center", "width", "amplitude"}, "phantom.bumps[]");
      GaussianBump bump;
      bump.center = vector_or_throw(b.at("center"), "phantom.bumps[].center");
      bump.width = get_or<double>(b, "width", 0.3, "phantom.bumps[]");
      bump.amplitude = get_or<double>(b, "amplitude", 1.0, "phantom.bumps[]");
      if (bump.center.size() != ambient) {
        throw ConfigError("phantom.bumps[].center: wrong dimension");
      }
      positive(bump.width, "phantom.bumps[].width");
      p.bumps.push_back(std::move(bump));
    }
  }
  if (j.contains("random_bumps")) {
    const Json& r = j["random_bumps"];
    allow_keys(r, {"count", "seed"}, "phantom.random_bumps");
    p.random_count = get_or<int>(r, "count", 3, "phantom.random_bumps");
    p.random_seed = (r.contains("seed") && !seed_overridden) ? get_or<std::uint64_t>(r, "seed", 0, "phantom.random_bumps")
                                                             : seed;
    if (p.random_count < 1) throw ConfigError("phantom.random_bumps.count must be positive");
  }
  if (p.kind == "gaussians" && p.bumps.empty() && p.random_count == 0) {
    p.random_count = 3;
    p.random_seed = seed;
  }
  if (!c.sphere_transform() && p.symmetry != SymmetryClass::Generic) {
    throw ConfigError("phantom.symmetry: Radon-John phantoms have no symmetry class");
  }
  if (c.sphere_transform() && p.kind == "cap") {
    throw ConfigError("phantom.kind: cap is a ball phantom (Radon-John scenarios only)");
  }
  const bool w_class = p.symmetry == SymmetryClass::WEven || p.symmetry == SymmetryClass::WOdd;
  if (w_class && !(c.center.norm() > 1.0)) {
    throw ConfigError("phantom.symmetry: W classes need an exterior center |a| > 1");
  }
}

void parse_verify(const Json& j, ExperimentConfig& c, std::uint64_t seed, bool seed_overridden) {
  allow_keys(j, {"checks", "seed", "center", "mobius_points", "bijection_planes", "conjugation_points",
                 "factorization_planes", "factorization_nodes", "mutation", "kernel_lattice",
                 "reduction_lattice", "measure_polar", "measure_azimuth", "determinant_samples",
                 "link_frames", "link_samples", "link_n", "link_k", "link_ell", "phantom_bumps"},
             "verify");
  VerifySettings& v = c.verify;
  v.seed = (j.contains("seed") && !seed_overridden) ? get_or<std::uint64_t>(j, "seed", 0, "verify") : seed;
  if (j.contains("center")) {
    v.center = vector_or_throw(j["center"], "verify.center");
  } else if (c.sphere_transform() && c.n == 2 && c.center.norm() > 1.0) {
    v.center = c.center;
  }
  if (v.center.size() != 3 || !(v.center.norm() > 1.0)) {
    throw ConfigError("verify.center: the suite runs on S^2 with an exterior center");
  }
  if (j.contains("checks")) {
    v.checks = get_or<std::vector<std::string>>(j, "checks", {}, "verify");
    for (const auto& name : v.checks) default_tolerance(name);
  }
  v.mobius_points = get_or(j, "mobius_points", v.mobius_points, "verify");
  v.bijection_planes = get_or(j, "bijection_planes", v.bijection_planes, "verify");
  v.conjugation_points = get_or(j, "conjugation_points", v.conjugation_points, "verify");
  v.factorization_planes = get_or(j, "factorization_planes", v.factorization_planes, "verify");
  v.factorization_nodes = get_or(j, "factorization_nodes", v.factorization_nodes, "verify");
  v.map_perturbation = get_or(j, "mutation", v.map_perturbation, "verify");
  if (j.contains("kernel_lattice")) v.kernel_lattice = lattice_from_json(j["kernel_lattice"]);
  if (j.contains("reduction_lattice")) v.reduction_lattice = lattice_from_json(j["reduction_lattice"]);
  v.measure_polar = get_or(j, "measure_polar", v.measure_polar, "verify");
  v.measure_azimuth = get_or(j, "measure_azimuth", v.measure_azimuth, "verify");
  v.determinant_samples = get_or(j, "determinant_samples", v.determinant_samples, "verify");
  v.link_frames = get_or(j, "link_frames", v.link_frames, "verify");
  v.link_samples = get_or(j, "link_samples", v.link_samples, "verify");
  v.link_n = get_or(j, "link_n", c.ell ? c.n : v.link_n, "verify");
  v.link_k = get_or(j, "link_k", c.ell ? c.k : v.link_k, "verify");
  v.link_ell = get_or(j, "link_ell", c.ell.value_or(v.link_ell), "verify");
  v.phantom_bumps = get_or(j, "phantom_bumps", v.phantom_bumps, "verify");
  if (!(1 < v.link_k && v.link_k < v.link_ell && v.link_ell <= v.link_n)) {
    throw ConfigError("verify: dimension link needs 1 < k < l <= n");
  }
  for (int count : {v.mobius_points, v.bijection_planes, v.conjugation_points, v.factorization_planes,
                    v.determinant_samples, v.link_frames, v.phantom_bumps}) {
    if (count < 1) throw ConfigError("verify: sample counts must be positive");
  }
  if (v.link_samples < 2) throw ConfigError("verify.link_samples: need at least two samples");
}

void parse_inversion(const Json& j, ExperimentConfig& c) {
  allow_keys(j, {"radial_nodes", "angular_nodes", "t_min", "t_levels", "fit_tolerance",
                 "boundary_clamp", "stencil_points", "relative_step", "quadrature_nodes", "points",
                 "points_radius", "data", "convergence_levels"},
             "inversion");
  RadonInversionSpec& s = c.inversion;
  s.radial_nodes = get_or(j, "radial_nodes", s.radial_nodes, "inversion");
  s.angular_nodes = get_or(j, "angular_nodes", s.angular_nodes, "inversion");
  s.t_min = get_or(j, "t_min", s.t_min, "inversion");
  s.t_levels = get_or(j, "t_levels", s.t_levels, "inversion");
  s.fit_tolerance = get_or(j, "fit_tolerance", s.fit_tolerance, "inversion");
  s.boundary_clamp = get_or(j, "boundary_clamp", s.boundary_clamp, "inversion");
  s.op.stencil_points = get_or(j, "stencil_points", s.op.stencil_points, "inversion");
  s.op.relative_step = get_or(j, "relative_step", s.op.relative_step, "inversion");
  s.op.quadrature_nodes = get_or(j, "quadrature_nodes", s.op.quadrature_nodes, "inversion");
  c.points = get_or(j, "points", c.points, "inversion");
  c.points_radius = get_or(j, "points_radius", c.points_radius, "inversion");
  c.radon_data = get_or<std::string>(j, "data", c.radon_data, "inversion");
  c.convergence_levels = get_or(j, "convergence_levels", c.convergence_levels, "inversion");
  if (s.radial_nodes < 4 || s.angular_nodes < 4 || s.t_levels < 3 || s.op.quadrature_nodes < 2) {
    throw ConfigError("inversion: node counts too small");
  }
  if (s.op.stencil_points < 3 || s.op.stencil_points % 2 == 0) {
    throw ConfigError("inversion.stencil_points: need an odd count >= 3");
  }
  positive(s.t_min, "inversion.t_min");
  positive(s.fit_tolerance, "inversion.fit_tolerance");
  positive(s.boundary_clamp, "inversion.boundary_clamp");
  positive(s.op.relative_step, "inversion.relative_step");
  if (c.points < 1 || !(c.points_radius > 0.0 && c.points_radius < 1.0)) {
    throw ConfigError("inversion: points need a count >= 1 and a radius in (0, 1)");
  }
  if (c.radon_data != "profile" && c.radon_data != "quadrature") {
    throw ConfigError("inversion.data: expected profile or quadrature");
  }
  if (c.convergence_levels < 0 || c.convergence_levels > 4) {
    throw ConfigError("inversion.convergence_levels: expected 0..4");
  }
}

}  // namespace

TransformSetup ExperimentConfig::setup() const {
  return TransformSetup{transform, n, k, sphere_transform() ? center : Vector()};
}

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir,
                              std::optional<std::uint64_t> seed_override) {
  allow_keys(j, {"scenario", "n", "k", "ell", "center", "transform", "lattice", "quadrature", "phantom",
                 "grid", "inversion", "tolerances", "verify", "seed", "threads", "outputs"},
             "config");
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.scenario = get_or<std::string>(j, "scenario", c.scenario, "config");
  c.seed = seed_override.value_or(get_or<std::uint64_t>(j, "seed", c.seed, "config"));
  const bool overridden = seed_override.has_value();
  c.threads = get_or(j, "threads", c.threads, "config");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  c.transform = parse_transform(get_or<std::string>(j, "transform", "funk", "config"));
  c.n = get_or(j, "n", c.n, "config");
  c.k = get_or(j, "k", c.sphere_transform() ? c.n : c.n - 1, "config");
  if (j.contains("ell")) c.ell = get_or<int>(j, "ell", 0, "config");

  if (c.sphere_transform()) {
    if (c.n < 2 || !(1 < c.k && c.k <= c.n)) {
      throw ConfigError("dimensions: need n >= 2 and 1 < k <= n");
    }
    if (c.ell && !(c.k < *c.ell && *c.ell <= c.n)) {
      throw ConfigError("dimensions: need k < ell <= n");
    }
    c.center = j.contains("center") ? vector_or_throw(j["center"], "center")
                                    : Vector(Vector::Unit(c.n + 1, c.n) * 2.0);
    if (c.center.size() != c.n + 1) throw ConfigError("center: expected n + 1 coordinates");
    if (!(c.center.norm() > 0.0)) throw ConfigError("center: must be nonzero");
  } else {
    if (c.n < 2 || c.n > 3 || c.k < 1 || c.k >= c.n) {
      throw ConfigError("dimensions: Radon-John data needs m in {2, 3} and 1 <= d < m");
    }
    if (c.ell) throw ConfigError("ell: only meaningful for sphere transforms");
  }

  if (j.contains("lattice")) {
    allow_keys(j["lattice"], {"kind", "angles", "offsets", "count", "seed"}, "lattice");
    c.sections.lattice = lattice_from_json(j["lattice"]);
    LatticeSpec& l = c.sections.lattice;
    if (l.kind == "random") {
      if (overridden || !j["lattice"].contains("seed")) l.seed = c.seed;
      l.angles = l.offsets = 0;
    } else {
      l.count = 0;
      l.seed = 0;
    }
  } else {
    c.sections.lattice = LatticeSpec{"angle_offset", 64, 32, 0, 0};
  }
  if (c.transform == TransformKind::Funk && c.sections.lattice.kind == "angle_offset" &&
      !(c.center.norm() > 1.0)) {
    throw ConfigError("lattice: angle_offset lattices for F need |a| > 1");
  }
  if (j.contains("quadrature")) {
    allow_keys(j["quadrature"], {"circle_nodes", "polar_nodes", "azimuth_nodes", "ball_angle_nodes",
                                 "ball_circle_nodes", "ball_polar_nodes", "ball_azimuth_nodes"},
               "quadrature");
    quadrature_from_json(j["quadrature"], c.sections.rule, c.sections.ball_rule);
  }
  const SectionRule& r = c.sections.rule;
  if (r.circle_nodes < 3 || r.polar_nodes < 2 || r.azimuth_nodes < 3 || c.sections.ball_rule.angle_nodes < 2) {
    throw ConfigError("quadrature: node counts too small");
  }

  parse_phantom(j.value("phantom", Json::object()), c, c.seed, overridden);

  if (j.contains("grid")) {
    allow_keys(j["grid"], {"polar", "azimuth"}, "grid");
    c.grid_polar = get_or(j["grid"], "polar", c.grid_polar, "grid");
    c.grid_azimuth = get_or(j["grid"], "azimuth", c.grid_azimuth, "grid");
  }
  if (c.grid_polar < 2 || c.grid_azimuth < 4 || c.grid_azimuth % 2 != 0) {
    throw ConfigError("grid: need polar >= 2 and an even azimuth >= 4");
  }

  parse_inversion(j.value("inversion", Json::object()), c);

  Json tolerances = j.value("tolerances", Json::object());
  if (!tolerances.is_object()) throw ConfigError("tolerances: expected an object");
  for (const auto& item : tolerances.items()) {
    if (!item.value().is_number()) throw ConfigError("tolerances." + item.key() + ": expected a number");
    const double v = item.value().get<double>();
    positive(v, "tolerances." + item.key());
    if (item.key() == "relative_l2") {
      c.relative_l2_tolerance = v;
    } else if (item.key() == "pointwise") {
      c.pointwise_tolerance = v;
    } else {
      default_tolerance(item.key());
      c.verify.tolerances[item.key()] = v;
    }
  }

  parse_verify(j.value("verify", Json::object()), c, c.seed, overridden);

  const Json outputs = j.value("outputs", Json::object());
  allow_keys(outputs, {"phantom", "profile", "reconstruction", "metrics", "report", "plots"}, "outputs");
  c.outputs.phantom = resolve(base_dir, outputs, "phantom", "phantom.csv");
  c.outputs.profile = resolve(base_dir, outputs, "profile", "profile.csv");
  c.outputs.reconstruction = resolve(base_dir, outputs, "reconstruction", "reconstruction.csv");
  c.outputs.metrics = resolve(base_dir, outputs, "metrics", "metrics.json");
  c.outputs.report = resolve(base_dir, outputs, "report", "report.json");
  c.outputs.plots = resolve(base_dir, outputs, "plots", "plots");
  return c;
}

ExperimentConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  const std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path(), seed_override);
}

namespace {

std::vector<GaussianBump> configured_bumps(const ExperimentConfig& c) {
  std::vector<GaussianBump> bumps = c.phantom.bumps;
  if (c.phantom.random_count > 0) {
    // random_bumps draws unit centers in R^{n+1}; ball phantoms use R^m at half radius
    const int sphere_n = c.sphere_transform() ? c.n : c.n - 1;
    for (GaussianBump b : random_bumps(sphere_n, c.phantom.random_count, c.phantom.random_seed)) {
      if (!c.sphere_transform()) b.center *= 0.5;
      bumps.push_back(std::move(b));
    }
  }
  return bumps;
}

}  // namespace

ScalarField phantom_field(const ExperimentConfig& c) {
  const PhantomConfig& p = c.phantom;
  if (!c.sphere_transform()) {
    if (p.kind == "constant") {
      const double v = p.value;
      return [v](PointRef y) { return y.squaredNorm() < 1.0 ? v : 0.0; };
    }
    if (p.kind == "cap") {
      const double v = p.value;
      return [v](PointRef y) {
        const double h = 1.0 - y.squaredNorm();
        return h > 0.0 ? v * std::sqrt(h) : 0.0;
      };
    }
    ScalarField g = gaussian_sum(configured_bumps(c));
    return [g = std::move(g)](PointRef y) { return y.squaredNorm() < 1.0 ? g(y) : 0.0; };
  }
  if (p.kind == "constant") {
    const double v = p.value;
    return symmetrize([v](PointRef) { return v; }, p.symmetry, c.center, c.k);
  }
  return make_phantom({configured_bumps(c), p.symmetry}, c.center, c.k);
}

ScalarField reconstruction_target(const ExperimentConfig& c) {
  ScalarField f = phantom_field(c);
  if (c.transform == TransformKind::ParallelSlice) {
    return parity_parts(c.center, std::move(f)).plus;
  }
  return f;
}

SphereGrid config_grid(const ExperimentConfig& c) {
  if (!c.sphere_transform()) {
    throw ConfigError("grid: Radon-John scenarios reconstruct at points, not on a sphere grid");
  }
  return SphereGrid(c.n, c.grid_polar, c.grid_azimuth);
}

Matrix radon_points(const ExperimentConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix pts(c.n, c.points);
  for (int i = 0; i < c.points; ++i) {
    Vector v(c.n);
    do {
      for (int l = 0; l < c.n; ++l) v(l) = normal(rng);
    } while (v.norm() < 1e-8);
    pts.col(i) = v.normalized() * c.points_radius * std::pow(u(rng), 1.0 / c.n);
  }
  return pts;
}

Json describe_config(const ExperimentConfig& c) {
  Json phantom{{"kind", c.phantom.kind}, {"symmetry", to_string(c.phantom.symmetry)}};
  if (c.phantom.kind != "gaussians") phantom["value"] = c.phantom.value;
  if (c.phantom.random_count > 0) {
    phantom["random_bumps"] = {{"count", c.phantom.random_count}, {"seed", c.phantom.random_seed}};
  }
  if (!c.phantom.bumps.empty()) {
    Json bumps = Json::array();
    for (const auto& b : c.phantom.bumps) {
      bumps.push_back({{"center", vector_to_json(b.center)}, {"width", b.width}, {"amplitude", b.amplitude}});
    }
    phantom["bumps"] = bumps;
  }
  return Json{{"scenario", c.scenario}, {"transform", to_string(c.transform)}, {"n", c.n},
              {"k", c.k},             {"center", vector_to_json(c.center)},  {"seed", c.seed},
              {"phantom", phantom}};
}

}  // namespace funkslice
