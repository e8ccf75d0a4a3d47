#include "funkslice/commands.hpp"
#include "funkslice/config.hpp"
#include "funkslice/errors.hpp"
#include "funkslice/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace funkslice;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per call, removed by the destructor
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("funkslice-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

Json funk_json() {
  return Json::parse(R"({
    "scenario": "t", "n": 2, "k": 2, "center": [0, 0, 2], "transform": "funk",
    "lattice": {"kind": "angle_offset", "angles": 64, "offsets": 32},
    "phantom": {"random_bumps": {"count": 3}, "symmetry": "W-even"},
    "grid": {"polar": 16, "azimuth": 32},
    "inversion": {"radial_nodes": 24, "angular_nodes": 48},
    "seed": 7
  })");
}

Json slice_json() {
  return Json::parse(R"({
    "scenario": "t", "n": 2, "k": 2, "center": [0, 0, 1], "transform": "slice",
    "lattice": {"kind": "angle_offset", "angles": 64, "offsets": 32},
    "phantom": {"random_bumps": {"count": 3}, "symmetry": "aperp-even"},
    "grid": {"polar": 16, "azimuth": 32},
    "inversion": {"radial_nodes": 24, "angular_nodes": 48},
    "seed": 3
  })");
}

Json radon_json() {
  return Json::parse(R"({
    "scenario": "t", "n": 2, "k": 1, "transform": "radon",
    "lattice": {"kind": "angle_offset", "angles": 128, "offsets": 64},
    "phantom": {"kind": "cap"},
    "inversion": {"points": 10, "points_radius": 0.9},
    "seed": 11
  })");
}

SectionProfile small_profile() {
  SectionProfile p;
  p.setup = TransformSetup{TransformKind::Funk, 2, 2, Vector::Unit(3, 2) * 2.0};
  p.lattice = LatticeSpec{"angle_offset", 3, 2, 0, 0};
  p.values = {0.1, 1.0 / 3.0, -2.5e-300, 7.0, std::nextafter(1.0, 2.0), 1e300};
  return p;
}

std::string slurp(const fs::path& p) { return read_text(p); }

}  // namespace

TEST_CASE("profile text round trip is exact") {
  const SectionProfile p = small_profile();
  const std::string text = format_profile(p);
  const SectionProfile q = parse_profile(text);
  CHECK(q.values == p.values);
  CHECK(q.lattice == p.lattice);
  CHECK(q.setup.center == p.setup.center);
  CHECK(format_profile(q) == text);

  TempDir dir;
  write_profile(dir.path / "p.csv", p);
  CHECK(slurp(dir.path / "p.csv") == text);
  CHECK(read_profile(dir.path / "p.csv").values == p.values);
}

TEST_CASE("flagged planes survive the round trip as NaN") {
  SectionProfile p = small_profile();
  p.values[3] = std::numeric_limits<double>::quiet_NaN();
  p.flagged = {3};
  const SectionProfile q = parse_profile(format_profile(p));
  CHECK(std::isnan(q.values[3]));
  CHECK(q.flagged == p.flagged);
}

TEST_CASE("malformed files raise IoError") {
  const std::string good = format_profile(small_profile());
  CHECK_THROWS_AS(parse_profile(""), IoError);
  CHECK_THROWS_AS(parse_profile("not json\n1,2\n"), IoError);
  CHECK_THROWS_AS(parse_profile(good.substr(0, good.rfind('\n', good.size() - 2) + 1)), IoError);
  std::string tampered = good;
  tampered[tampered.rfind(',') + 1] = 'x';
  CHECK_THROWS_AS(parse_profile(tampered), IoError);
  CHECK_THROWS_AS(read_profile("/nonexistent/dir/profile.csv"), IoError);
  CHECK_THROWS_AS(write_atomically("/nonexistent/dir/out.csv", "x"), IoError);
}

TEST_CASE("field and point files round trip exactly") {
  const SphereGrid grid(2, 4, 8);
  FieldFile f{GridField{grid, std::vector<double>(grid.size())}, Json{{"note", "x"}}};
  for (std::size_t i = 0; i < grid.size(); ++i) f.field.values[i] = std::sin(1.0 + static_cast<double>(i)) / 3.0;
  const FieldFile g = parse_field(format_field(f));
  CHECK(g.field.grid == grid);
  CHECK(g.field.values == f.field.values);
  CHECK(g.meta["note"] == "x");

  PointSet s;
  s.points = Matrix::Random(3, 5);
  s.values = {1.0 / 7.0, 2.0, -3.0, 1e-17, 5.5};
  const PointSet t = parse_points(format_points(s));
  CHECK(t.points == s.points);
  CHECK(t.values == s.values);
  CHECK_THROWS_AS(parse_field("{}\n"), IoError);
}

TEST_CASE("config validation") {
  const fs::path base = fs::temp_directory_path();
  CHECK_NOTHROW(parse_config(funk_json(), base));
  const auto rejects = [&](Json j) { CHECK_THROWS_AS(parse_config(j, base), ConfigError); };

  Json j = funk_json();
  j["colour"] = "red";
  rejects(j);
  j = funk_json();
  j["phantom"]["widht"] = 0.2;
  rejects(j);
  j = funk_json();
  j["k"] = 3;
  rejects(j);
  j = funk_json();
  j["k"] = 1;
  rejects(j);
  j = funk_json();
  j["center"] = {0, 0};
  rejects(j);
  j = funk_json();
  j["center"] = {0, 0, 0.5};  // W classes need |a| > 1
  rejects(j);
  j = funk_json();
  j["transform"] = "fourier";
  rejects(j);
  j = funk_json();
  j["phantom"]["symmetry"] = "even";
  rejects(j);
  j = funk_json();
  j["grid"]["azimuth"] = 33;
  rejects(j);
  j = funk_json();
  j["inversion"]["stencil_points"] = 4;
  rejects(j);
  j = funk_json();
  j["tolerances"] = {{"no-such-check", 1e-3}};
  rejects(j);
  j = funk_json();
  j["tolerances"] = {{"relative_l2", -1.0}};
  rejects(j);
  j = funk_json();
  j["n"] = "two";
  rejects(j);
  j = funk_json();
  j["verify"] = {{"checks", {"mobius", "nonsense"}}};
  rejects(j);
  j = radon_json();
  j["phantom"]["symmetry"] = "W-even";
  rejects(j);
  j = radon_json();
  j["n"] = 4;
  rejects(j);

  TempDir dir;
  {
    std::ofstream(dir.path / "broken.json") << "{ \"n\": ";
  }
  CHECK_THROWS_AS(load_config(dir.path / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir.path / "missing.json"), IoError);
}

TEST_CASE("seed override replaces every derived seed") {
  const fs::path base = fs::temp_directory_path();
  Json j = funk_json();
  j["phantom"]["random_bumps"]["seed"] = 99;
  j["verify"] = {{"seed", 5}};
  const ExperimentConfig plain = parse_config(j, base);
  CHECK(plain.seed == 7);
  CHECK(plain.phantom.random_seed == 99);
  CHECK(plain.verify.seed == 5);
  const ExperimentConfig over = parse_config(j, base, 1234);
  CHECK(over.seed == 1234);
  CHECK(over.phantom.random_seed == 1234);
  CHECK(over.verify.seed == 1234);

  Json r = funk_json();
  r["lattice"] = {{"kind", "random"}, {"count", 20}, {"seed", 8}};
  CHECK(parse_config(r, base).sections.lattice.seed == 8);
  CHECK(parse_config(r, base, 3).sections.lattice.seed == 3);
  // grid lattices carry no seed, so profiles compare equal across overrides
  CHECK(parse_config(funk_json(), base, 3).sections.lattice == parse_config(funk_json(), base).sections.lattice);
}

TEST_CASE("relative output paths resolve against the config directory") {
  Json j = funk_json();
  j["outputs"] = {{"profile", "sub/p.csv"}, {"metrics", "/abs/m.json"}};
  const ExperimentConfig c = parse_config(j, "/base");
  CHECK(c.outputs.profile == fs::path("/base/sub/p.csv"));
  CHECK(c.outputs.metrics == fs::path("/abs/m.json"));
  CHECK(c.outputs.reconstruction == fs::path("/base/reconstruction.csv"));
}

TEST_CASE("phantom command writes the symmetry residual") {
  TempDir dir;
  SUBCASE("W-even") {
    const ExperimentConfig c = parse_config(funk_json(), dir.path);
    cmd_phantom(c);
    const FieldFile f = read_field(c.outputs.phantom);
    CHECK(f.meta["symmetry_residual"].get<double>() <= 1e-11);
    CHECK(f.field.grid == config_grid(c));
  }
  SUBCASE("generic phantom re-reads bit for bit") {
    Json j = funk_json();
    j["phantom"]["symmetry"] = "generic";
    const ExperimentConfig c = parse_config(j, dir.path);
    cmd_phantom(c);
    const std::string text = slurp(c.outputs.phantom);
    CHECK(format_field(read_field(c.outputs.phantom)) == text);
    const GridField direct = sample_field(config_grid(c), phantom_field(c));
    CHECK(read_field(c.outputs.phantom).field.values == direct.values);
  }
  SUBCASE("radon scenarios write points") {
    const ExperimentConfig c = parse_config(radon_json(), dir.path);
    cmd_phantom(c);
    const PointSet s = read_points(c.outputs.phantom);
    CHECK(s.points.cols() == 10);
    CHECK((s.points.colwise().norm().array() <= 0.9 + 1e-15).all());
  }
}

TEST_CASE("aperp-odd phantoms are annihilated by the slice transform") {
  Json j = slice_json();
  j["phantom"]["symmetry"] = "aperp-odd";
  j["lattice"] = {{"kind", "angle_offset"}, {"angles", 16}, {"offsets", 8}};
  const ExperimentConfig c = parse_config(j, fs::temp_directory_path());
  const SectionProfile p = profile_sweep(c.setup(), phantom_field(c), c.sections, 1);
  double worst = 0.0;
  for (double v : p.values) worst = std::max(worst, std::abs(v));
  CHECK(worst <= 1e-6);
}

TEST_CASE("forward command on constants and digests") {
  TempDir dir;
  Json j = funk_json();
  j["phantom"] = {{"kind", "constant"}, {"value", 1.0}, {"symmetry", "generic"}};
  j["lattice"] = {{"kind", "angle_offset"}, {"angles", 8}, {"offsets", 4}};
  ExperimentConfig c = parse_config(j, dir.path);
  const SectionProfile p = cmd_forward(c);
  REQUIRE(p.flagged.empty());
  // F of the constant one is the section length for the circle through a
  const std::vector<LatticePlane> planes = enumerate_lattice(c.setup(), c.sections.lattice);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const double h = planes[i].offset[0];
    CHECK(p.values[i] == doctest::Approx(2 * pi * std::sqrt(1 - h * h)).epsilon(1e-12));
  }

  const std::string first = slurp(c.outputs.profile);
  cmd_forward(c);
  CHECK(slurp(c.outputs.profile) == first);
  c.threads = 3;
  cmd_forward(c);
  CHECK(content_digest(slurp(c.outputs.profile)) == content_digest(first));
  CHECK(content_digest(first).size() == 16);
  CHECK(content_digest("a") != content_digest("b"));
}

TEST_CASE("inversion refuses a profile from another configuration") {
  const fs::path base = fs::temp_directory_path();
  const ExperimentConfig c = parse_config(funk_json(), base);
  SectionProfile p;
  p.setup = c.setup();
  p.lattice = c.sections.lattice;
  p.rule = c.sections.rule;
  p.ball_rule = c.sections.ball_rule;
  CHECK_NOTHROW(require_matching_profile(p, c));
  SectionProfile other = p;
  other.setup.center = Vector::Unit(3, 2) * 3.0;
  CHECK_THROWS_AS(require_matching_profile(other, c), ConfigError);
  other = p;
  other.lattice.angles = 32;
  CHECK_THROWS_AS(require_matching_profile(other, c), ConfigError);
  other = p;
  other.setup.transform = TransformKind::ParallelSlice;
  CHECK_THROWS_AS(require_matching_profile(other, c), ConfigError);
  other = p;
  other.rule.circle_nodes += 2;
  CHECK_THROWS_AS(require_matching_profile(other, c), ConfigError);
}

TEST_CASE("end-to-end round trips") {
  TempDir dir;
  SUBCASE("Funk on a W-even phantom") {
    const ExperimentConfig c = parse_config(funk_json(), dir.path);
    cmd_forward(c);
    const Json m = cmd_invert(c);
    CHECK(m["passed"].get<bool>());
    CHECK(m["error"]["relative_l2"].get<double>() <= 1e-2);
    CHECK(read_field(c.outputs.reconstruction).field.grid == config_grid(c));
    CHECK(Json::parse(slurp(c.outputs.metrics)) == m);
  }
  SUBCASE("parallel slices on an a-perp-even phantom") {
    const ExperimentConfig c = parse_config(slice_json(), dir.path);
    cmd_forward(c);
    const Json m = cmd_invert(c);
    CHECK(m["error"]["relative_l2"].get<double>() <= 1e-2);
  }
  SUBCASE("Radon-John on the disk") {
    const ExperimentConfig c = parse_config(radon_json(), dir.path);
    cmd_forward(c);
    const Json m = cmd_invert(c);
    CHECK(m["error"]["max_abs"].get<double>() <= 1e-2);
    CHECK(read_points(c.outputs.reconstruction).values.size() == 10);
  }
  SUBCASE("a tolerance that cannot be met raises AccuracyError after writing") {
    Json j = slice_json();
    j["tolerances"] = {{"relative_l2", 1e-12}};
    const ExperimentConfig c = parse_config(j, dir.path);
    cmd_forward(c);
    CHECK_THROWS_AS(cmd_invert(c), AccuracyError);
    CHECK(fs::exists(c.outputs.metrics));
    CHECK_FALSE(Json::parse(slurp(c.outputs.metrics))["passed"].get<bool>());
  }
  SUBCASE("a missing profile is an I/O error") {
    const ExperimentConfig c = parse_config(slice_json(), dir.path);
    CHECK_THROWS_AS(cmd_invert(c), IoError);
  }
  SUBCASE("a profile of another lattice is a config error") {
    const ExperimentConfig c = parse_config(slice_json(), dir.path);
    cmd_forward(c);
    Json j = slice_json();
    j["lattice"]["angles"] = 32;
    CHECK_THROWS_AS(cmd_invert(parse_config(j, dir.path)), ConfigError);
  }
}

TEST_CASE("verification report lists each check once") {
  TempDir dir;
  Json j = funk_json();
  j["verify"] = {{"checks", {"mobius", "involution", "determinant"}},
                 {"mobius_points", 500},
                 {"determinant_samples", 100},
                 {"measure_polar", 20},
                 {"measure_azimuth", 20}};
  const ExperimentConfig c = parse_config(j, dir.path);
  const VerificationReport r = cmd_verify(c);
  CHECK(r.all_passed());
  const Json report = Json::parse(slurp(c.outputs.report));
  CHECK(report["format"] == "funkslice-verification");
  REQUIRE(report["checks"].size() == 3);
  CHECK(report["checks"][0]["name"] == "mobius");
  CHECK(report["checks"][2]["name"] == "determinant");

  Json dup = funk_json();
  dup["verify"] = {{"checks", {"mobius", "mobius"}}};
  CHECK_THROWS_AS(run_verification(parse_config(dup, dir.path).verify), ConfigError);
}

TEST_CASE("a perturbed map is caught by the factorization check") {
  VerifySettings s;
  s.factorization_planes = 20;
  s.factorization_nodes = 256;
  CHECK(run_check("factorization", s).passed);
  s.map_perturbation = 1e-6;
  const CheckResult r = run_check("factorization", s);
  CHECK_FALSE(r.passed);
  CHECK(r.residual > r.tolerance);
}

#ifdef FUNKSLICE_CLI
TEST_CASE("command-line exit codes") {
  TempDir dir;
  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string("FUNKSLICE_LOG=off \"") + FUNKSLICE_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto write = [&](const std::string& name, const Json& j) {
    std::ofstream(dir.path / name) << j.dump();
    return "--config \"" + (dir.path / name).string() + "\"";
  };

  Json ok = slice_json();
  ok["lattice"] = {{"kind", "angle_offset"}, {"angles", 16}, {"offsets", 8}};
  const std::string good = write("ok.json", ok);
  CHECK(run("phantom " + good) == 0);
  CHECK(run("forward " + good + " --threads 2 --seed 5") == 0);
  CHECK(fs::exists(dir.path / "profile.csv"));

  Json bad = ok;
  bad["typo"] = 1;
  CHECK(run("forward " + write("bad.json", bad)) == 2);
  CHECK(run("forward") == 2);
  CHECK(run("frobnicate " + good) == 2);
  CHECK(run("forward --config \"" + (dir.path / "absent.json").string() + "\"") == 4);

  Json strict = slice_json();
  strict["tolerances"] = {{"relative_l2", 1e-12}};
  strict["outputs"] = {{"profile", "strict.csv"}};
  const std::string s = write("strict.json", strict);
  CHECK(run("forward " + s) == 0);
  CHECK(run("invert " + s) == 3);

  Json unwritable = ok;
  unwritable["outputs"] = {{"profile", "/proc/funkslice/profile.csv"}};
  CHECK(run("forward " + write("unwritable.json", unwritable)) == 4);
}
#endif
