#include "funkslice/commands.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace funkslice {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_parent(const fs::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
}

struct MaskedError {
  double relative_l2 = 0.0;
  double linf = 0.0;
  std::size_t used = 0;
};

// surface-weighted errors over grid points not excluded by `skip`
MaskedError grid_error(const SphereGrid& grid, const std::vector<double>& values,
                       const std::vector<double>& truth, const std::vector<char>& skip) {
  MaskedError e;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (skip[i]) continue;
    const double w = grid.weight(i);
    const double d = values[i] - truth[i];
    num += w * d * d;
    den += w * truth[i] * truth[i];
    e.linf = std::max(e.linf, std::abs(d));
    ++e.used;
  }
  e.relative_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return e;
}

Json error_json(const MaskedError& e) {
  return Json{{"relative_l2", e.relative_l2}, {"linf", e.linf}, {"points", e.used}};
}

}  // namespace

std::string content_digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json cmd_phantom(const ExperimentConfig& c) {
  const ScalarField f = phantom_field(c);
  Json meta = describe_config(c);
  ensure_parent(c.outputs.phantom);
  if (!c.sphere_transform()) {
    PointSet set{radon_points(c), {}, meta};
    set.values.resize(static_cast<std::size_t>(set.points.cols()));
    for (Eigen::Index i = 0; i < set.points.cols(); ++i) {
      set.values[static_cast<std::size_t>(i)] = f(set.points.col(i));
    }
    write_points(c.outputs.phantom, set);
    spdlog::info("phantom: {} ball points -> {}", set.values.size(), c.outputs.phantom.string());
    return meta;
  }
  const SphereGrid grid = config_grid(c);
  FieldFile file{sample_field(grid, f, c.threads), meta};
  const double residual = symmetry_residual(f, c.phantom.symmetry, c.center, c.k, grid);
  file.meta["symmetry_residual"] = residual;
  write_field(c.outputs.phantom, file);
  spdlog::info("phantom: {} grid points, class {}, symmetry residual {:.3e} -> {}", grid.size(),
               to_string(c.phantom.symmetry), residual, c.outputs.phantom.string());
  return file.meta;
}

SectionProfile cmd_forward(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const SectionProfile profile = profile_sweep(c.setup(), phantom_field(c), c.sections, c.threads);
  ensure_parent(c.outputs.profile);
  const std::string text = format_profile(profile);
  write_atomically(c.outputs.profile, text);
  spdlog::info("forward: {} {} planes in {:.2f} s, digest {} -> {}", to_string(c.transform),
               profile.values.size(), seconds_since(t0), content_digest(text), c.outputs.profile.string());
  if (!profile.flagged.empty()) {
    spdlog::warn("forward: {} planes flagged (NaN)", profile.flagged.size());
  }
  return profile;
}

void require_matching_profile(const SectionProfile& p, const ExperimentConfig& c) {
  const TransformSetup want = c.setup();
  std::string why;
  if (p.setup.transform != want.transform) {
    why = "transform " + to_string(p.setup.transform) + " vs " + to_string(want.transform);
  } else if (p.setup.dim != want.dim || p.setup.section_dim != want.section_dim) {
    why = "dimensions";
  } else if (c.sphere_transform() &&
             (p.setup.center.size() != want.center.size() ||
              (p.setup.center - want.center).norm() > 1e-12 * std::max(1.0, want.center.norm()))) {
    why = "center";
  } else if (!(p.lattice == c.sections.lattice)) {
    why = "lattice";
  } else if (!(p.rule == c.sections.rule) || !(p.ball_rule == c.sections.ball_rule)) {
    why = "quadrature";
  }
  if (!why.empty()) {
    throw ConfigError("profile does not match the configuration (" + why + ")");
  }
}

InversionOutcome invert_profile(const SectionProfile& profile, const ExperimentConfig& c) {
  require_matching_profile(profile, c);
  if (!profile.flagged.empty()) {
    throw AccuracyError("profile carries " + std::to_string(profile.flagged.size()) + " flagged planes");
  }
  const auto t0 = std::chrono::steady_clock::now();
  InversionOutcome out;
  Json& m = out.metrics;
  m = describe_config(c);

  if (!c.sphere_transform()) {
    if (c.k != c.n - 1) {
      throw UnsupportedError("Radon-John inversion is implemented for hyperplanes (d = m - 1)");
    }
    HyperplaneData data;
    if (c.radon_data == "profile") {
      data = hyperplane_data(profile);
    } else {
      data = hyperplane_data(phantom_field(c), c.n, c.sections.ball_rule);
    }
    const Matrix pts = radon_points(c);
    const ScalarField truth = reconstruction_target(c);
    std::vector<double> values(static_cast<std::size_t>(pts.cols()));
    std::vector<char> flagged(values.size(), 0);
    RadonInversionSpec spec = c.inversion;
    spec.op.d = c.k;
    parallel_for(values.size(), c.threads, [&](std::size_t i) {
      try {
        values[i] = radon_invert(data, pts.col(static_cast<Eigen::Index>(i)), spec).value;
      } catch (const Error&) {
        values[i] = std::numeric_limits<double>::quiet_NaN();
        flagged[i] = 1;
      }
    });
    double worst = 0.0, sum2 = 0.0;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (flagged[i]) {
        ++bad;
        continue;
      }
      const double d = values[i] - truth(pts.col(static_cast<Eigen::Index>(i)));
      worst = std::max(worst, std::abs(d));
      sum2 += d * d;
    }
    m["error"] = {{"max_abs", worst},
                  {"rms", values.size() > bad ? std::sqrt(sum2 / static_cast<double>(values.size() - bad)) : 0.0},
                  {"points", values.size() - bad}};
    m["flagged"] = bad;
    m["tolerance"] = {{"pointwise", c.pointwise_tolerance}};
    m["passed"] = bad == 0 && worst <= c.pointwise_tolerance;
    out.points = PointSet{pts, std::move(values), describe_config(c)};
  } else {
    const SphereGrid grid = config_grid(c);
    Reconstruction rec;
    if (c.transform == TransformKind::Funk) {
      rec = funk_invert(CenterContext(c.center, c.k), profile, grid, c.inversion, c.threads);
    } else if (c.transform == TransformKind::ParallelSlice) {
      rec = slice_invert_grid(c.center, slice_radon_data(profile), grid, c.inversion, c.threads);
    } else {
      throw UnsupportedError("inversion of the normalized transform is not part of the pipeline");
    }
    std::vector<char> skip(grid.size(), 0);
    for (std::size_t i : rec.flagged) skip[i] = 1;
    for (std::size_t i : rec.equator) skip[i] = 1;
    const GridField truth = sample_field(grid, reconstruction_target(c), c.threads);
    const MaskedError e = grid_error(grid, rec.field.values, truth.values, skip);
    m["error"] = error_json(e);
    if (c.transform == TransformKind::Funk && c.phantom.symmetry != SymmetryClass::WEven) {
      // observation only: distance to the W-even part of the input
      const GridField even =
          sample_field(grid, symmetrize(phantom_field(c), SymmetryClass::WEven, c.center, c.k), c.threads);
      m["observation_w_even_part"] = error_json(grid_error(grid, rec.field.values, even.values, skip));
    }
    m["flagged"] = rec.flagged.size();
    m["equator"] = rec.equator.size();
    m["clamped"] = rec.clamped;
    m["tolerance"] = {{"relative_l2", c.relative_l2_tolerance}};
    m["passed"] = rec.flagged.empty() && e.relative_l2 <= c.relative_l2_tolerance;
    out.field = FieldFile{std::move(rec.field), describe_config(c)};
    out.field.meta["error"] = m["error"];
  }
  m["runtime_seconds"] = seconds_since(t0);
  return out;
}

Json cmd_invert(const ExperimentConfig& c) {
  const SectionProfile profile = read_profile(c.outputs.profile);
  InversionOutcome out = invert_profile(profile, c);
  Json& m = out.metrics;

  if (c.convergence_levels > 0) {
    Json levels = Json::array();
    const auto record = [&](int level, const ExperimentConfig& lc, const Json& lm) {
      levels.push_back({{"level", level},
                        {"lattice", lattice_to_json(lc.sections.lattice)},
                        {"radial_nodes", lc.inversion.radial_nodes},
                        {"angular_nodes", lc.inversion.angular_nodes},
                        {"error", lm["error"]}});
    };
    record(0, c, m);
    for (int level = 1; level <= c.convergence_levels; ++level) {
      ExperimentConfig lc = c;
      const int scale = 1 << level;
      lc.sections.lattice.angles *= scale;
      lc.sections.lattice.offsets *= scale;
      lc.sections.lattice.count *= scale * scale;
      lc.inversion.radial_nodes *= scale;
      lc.inversion.angular_nodes *= scale;
      const SectionProfile p = profile_sweep(lc.setup(), phantom_field(lc), lc.sections, lc.threads);
      const InversionOutcome o = invert_profile(p, lc);
      record(level, lc, o.metrics);
      spdlog::info("convergence level {}: {}", level, o.metrics["error"].dump());
    }
    const char* key = c.sphere_transform() ? "relative_l2" : "max_abs";
    bool monotone = true;
    Json orders = Json::array();
    for (std::size_t i = 1; i < levels.size(); ++i) {
      const double prev = levels[i - 1]["error"][key].get<double>();
      const double cur = levels[i]["error"][key].get<double>();
      monotone = monotone && cur < prev;
      orders.push_back(std::log2(prev / cur));
    }
    m["convergence"] = {{"metric", key}, {"levels", levels}, {"orders", orders}, {"monotone", monotone}};
  }

  ensure_parent(c.outputs.reconstruction);
  if (c.sphere_transform()) {
    write_field(c.outputs.reconstruction, out.field);
  } else {
    write_points(c.outputs.reconstruction, out.points);
  }
  ensure_parent(c.outputs.metrics);
  write_atomically(c.outputs.metrics, m.dump(2) + "\n");
  spdlog::info("invert: error {} in {:.2f} s -> {}", m["error"].dump(), m["runtime_seconds"].get<double>(),
               c.outputs.reconstruction.string());
  if (!m["passed"].get<bool>()) {
    throw AccuracyError("reconstruction error above tolerance: " + m["error"].dump());
  }
  return m;
}

Json report_to_json(const VerificationReport& report) {
  Json checks = Json::array();
  for (const auto& r : report.checks) {
    checks.push_back({{"name", r.name},
                      {"residual", std::isfinite(r.residual) ? Json(r.residual) : Json("inf")},
                      {"tolerance", r.tolerance},
                      {"passed", r.passed},
                      {"runtime_seconds", r.runtime_seconds},
                      {"detail", r.detail}});
  }
  return Json{{"format", "funkslice-verification"}, {"passed", report.all_passed()}, {"checks", checks}};
}

VerificationReport cmd_verify(const ExperimentConfig& c) {
  const VerificationReport report = run_verification(c.verify);
  for (const auto& r : report.checks) {
    spdlog::info("verify {:<18} {} residual {:.3e} tol {:.1e} ({:.2f} s) {}", r.name,
                 r.passed ? "PASS" : "FAIL", r.residual, r.tolerance, r.runtime_seconds, r.detail);
  }
  ensure_parent(c.outputs.report);
  write_atomically(c.outputs.report, report_to_json(report).dump(2) + "\n");
  return report;
}

namespace {

std::array<unsigned char, 3> colour(double u) {
  // viridis, five stops
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  if (!std::isfinite(u)) return {255, 0, 255};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double w = u - i;
  std::array<unsigned char, 3> out{};
  for (int ch = 0; ch < 3; ++ch) {
    out[static_cast<std::size_t>(ch)] =
        static_cast<unsigned char>(std::lround(stops[i][ch] * (1.0 - w) + stops[i + 1][ch] * w));
  }
  return out;
}

// rows x cols table rendered with nearest-neighbour upscaling
void write_heatmap(const fs::path& path, int rows, int cols, const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v) {
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const int scale = std::max(1, 512 / std::max(rows, cols));
  const int h = rows * scale, w = cols * scale;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(3 * w * h));
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      const double x = v[static_cast<std::size_t>((r / scale) * cols + col / scale)];
      const auto rgb = colour((x - lo) / (hi - lo));
      out.append(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
  write_atomically(path, out);
}

// the n = 2 grid as polar x azimuth; for n = 3 the middle slice of the first polar angle
void field_table(const GridField& f, const std::vector<double>& values, int& rows, int& cols,
                 std::vector<double>& table) {
  const SphereGrid& g = f.grid;
  cols = g.azimuth();
  rows = g.polar();
  table.clear();
  const std::size_t block = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const std::size_t first = g.dim() == 2 ? 0 : static_cast<std::size_t>(g.polar() / 2) * block;
  for (std::size_t i = 0; i < block; ++i) table.push_back(values[first + i]);
}

void write_curve(const fs::path& path, const Json& convergence) {
  const Json& levels = convergence["levels"];
  const std::string key = convergence["metric"].get<std::string>();
  std::vector<double> y;
  for (const auto& l : levels) y.push_back(std::log10(l["error"][key].get<double>()));
  const double lo = std::floor(*std::min_element(y.begin(), y.end()));
  const double hi = std::ceil(*std::max_element(y.begin(), y.end())) + (y.size() == 1 ? 1 : 0);
  const double W = 480, H = 320, pad = 50;
  auto px = [&](std::size_t i) { return pad + (W - 2 * pad) * (y.size() > 1 ? double(i) / (y.size() - 1) : 0.5); };
  auto py = [&](double v) { return H - pad - (H - 2 * pad) * (v - lo) / std::max(hi - lo, 1e-9); };
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  for (double d = lo; d <= hi + 1e-9; d += 1.0) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/><text x=\"5\" y=\"%g\" "
                  "font-size=\"12\">1e%d</text>\n",
                  pad, py(d), W - pad, py(d), py(d) + 4, static_cast<int>(d));
    svg += buf;
  }
  svg += "<polyline fill=\"none\" stroke=\"#3b528b\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g,%g ", px(i), py(y[i]));
    svg += buf;
  }
  svg += "\"/>\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%g\" cy=\"%g\" r=\"4\" fill=\"#21918c\"/><text x=\"%g\" y=\"%g\" "
                  "font-size=\"12\">L%zu</text>\n",
                  px(i), py(y[i]), px(i) - 6, H - pad + 20, i);
    svg += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"20\" font-size=\"14\">%s error by level</text>\n", pad,
                key.c_str());
  svg += buf;
  svg += "</svg>\n";
  write_atomically(path, svg);
}

}  // namespace

std::vector<std::string> cmd_plot(const ExperimentConfig& c) {
  std::vector<std::string> written;
  const fs::path dir = c.outputs.plots;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create plot directory '" + dir.string() + "'");

  if (fs::exists(c.outputs.profile)) {
    const SectionProfile p = read_profile(c.outputs.profile);
    if (p.lattice.kind == "angle_offset") {
      const fs::path out = dir / "profile.ppm";
      write_heatmap(out, p.lattice.angles, p.lattice.offsets, p.values);
      written.push_back(out.string());
    } else {
      spdlog::warn("plot: random lattices have no heatmap layout");
    }
  }
  if (c.sphere_transform() && fs::exists(c.outputs.reconstruction)) {
    const FieldFile rec = read_field(c.outputs.reconstruction);
    int rows = 0, cols = 0;
    std::vector<double> table;
    field_table(rec.field, rec.field.values, rows, cols, table);
    const fs::path out = dir / "reconstruction.ppm";
    write_heatmap(out, rows, cols, table);
    written.push_back(out.string());
    if (rec.field.grid == config_grid(c)) {
      const GridField truth = sample_field(rec.field.grid, reconstruction_target(c), c.threads);
      std::vector<double> err(truth.values.size());
      for (std::size_t i = 0; i < err.size(); ++i) err[i] = std::abs(rec.field.values[i] - truth.values[i]);
      field_table(rec.field, err, rows, cols, table);
      const fs::path eout = dir / "error.ppm";
      write_heatmap(eout, rows, cols, table);
      written.push_back(eout.string());
    }
  }
  if (fs::exists(c.outputs.metrics)) {
    Json m;
    try {
      m = Json::parse(read_text(c.outputs.metrics));
    } catch (const Json::exception& e) {
      throw IoError("metrics file is not valid JSON: " + std::string(e.what()));
    }
    if (m.contains("convergence")) {
      const fs::path out = dir / "convergence.svg";
      write_curve(out, m["convergence"]);
      written.push_back(out.string());
    }
  }
  if (written.empty()) {
    throw IoError("plot: no profile, reconstruction or metrics to render");
  }
  for (const auto& w : written) spdlog::info("plot -> {}", w);
  return written;
}

}  // namespace funkslice
