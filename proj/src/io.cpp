#include "funkslice/io.hpp"

#include "funkslice/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace funkslice {

namespace fs = std::filesystem;

namespace {

struct Lines {
  explicit Lines(const std::string& text) : in(text) {}
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (!line.empty()) {
        ++number;
        return true;
      }
    }
    return false;
  }
  std::istringstream in;
  int number = 0;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

double parse_number(const std::string& s, int line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw IoError("line " + std::to_string(line) + ": malformed number '" + s + "'");
  }
  return v;
}

long parse_index(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw IoError("line " + std::to_string(line) + ": malformed index '" + s + "'");
  }
  return v;
}

Json parse_header(Lines& lines, const char* format) {
  std::string line;
  if (!lines.next(line)) {
    throw IoError(std::string(format) + ": empty file");
  }
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw IoError(std::string(format) + ": header is not valid JSON (" + e.what() + ")");
  }
  if (!header.is_object() || header.value("format", std::string()) != format) {
    throw IoError(std::string("expected a ") + format + " file");
  }
  return header;
}

void expect_columns(Lines& lines, const std::string& expected) {
  std::string line;
  if (!lines.next(line) || line != expected) {
    throw IoError("CSV column header mismatch: expected '" + expected + "'");
  }
}

template <class T>
T json_get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw IoError(std::string("header field '") + key + "': " + e.what());
  }
}

std::string grid_columns(int n) {
  std::string cols;
  for (int l = 1; l <= n - 1; ++l) {
    cols += "t" + std::to_string(l) + ",";
  }
  return cols + "az,value";
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out << contents;
    out.flush();
    if (!out) {
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json lattice_to_json(const LatticeSpec& spec) {
  Json j{{"kind", spec.kind}};
  if (spec.kind == "random") {
    j["count"] = spec.count;
    j["seed"] = spec.seed;
  } else {
    j["angles"] = spec.angles;
    j["offsets"] = spec.offsets;
  }
  return j;
}

LatticeSpec lattice_from_json(const Json& j) {
  LatticeSpec spec;
  spec.kind = j.value("kind", std::string("angle_offset"));
  spec.angles = j.value("angles", 0);
  spec.offsets = j.value("offsets", 0);
  spec.count = j.value("count", 0);
  spec.seed = j.value("seed", std::uint64_t{0});
  return spec;
}

Json quadrature_to_json(const SectionRule& rule, const BallSectionRule& ball) {
  return Json{{"circle_nodes", rule.circle_nodes},
              {"polar_nodes", rule.polar_nodes},
              {"azimuth_nodes", rule.azimuth_nodes},
              {"ball_angle_nodes", ball.angle_nodes},
              {"ball_circle_nodes", ball.sphere.circle_nodes},
              {"ball_polar_nodes", ball.sphere.polar_nodes},
              {"ball_azimuth_nodes", ball.sphere.azimuth_nodes}};
}

void quadrature_from_json(const Json& j, SectionRule& rule, BallSectionRule& ball) {
  rule.circle_nodes = j.value("circle_nodes", rule.circle_nodes);
  rule.polar_nodes = j.value("polar_nodes", rule.polar_nodes);
  rule.azimuth_nodes = j.value("azimuth_nodes", rule.azimuth_nodes);
  ball.angle_nodes = j.value("ball_angle_nodes", ball.angle_nodes);
  ball.sphere.circle_nodes = j.value("ball_circle_nodes", ball.sphere.circle_nodes);
  ball.sphere.polar_nodes = j.value("ball_polar_nodes", ball.sphere.polar_nodes);
  ball.sphere.azimuth_nodes = j.value("ball_azimuth_nodes", ball.sphere.azimuth_nodes);
}

Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    j.push_back(v(i));
  }
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ConfigError("expected a numeric array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError("expected a numeric array");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::string format_profile(const SectionProfile& p) {
  if (p.values.size() != p.lattice.size()) {
    throw DomainError("format_profile: value count does not match the lattice");
  }
  Json header{{"format", "funkslice-profile"},
              {"version", 1},
              {"transform", to_string(p.setup.transform)},
              {"n", p.setup.dim},
              {"k", p.setup.section_dim},
              {"center", vector_to_json(p.setup.center)},
              {"lattice", lattice_to_json(p.lattice)},
              {"quadrature", quadrature_to_json(p.rule, p.ball_rule)},
              {"code_version", p.code_version},
              {"count", p.values.size()},
              {"flagged", p.flagged}};
  std::string out = header.dump() + "\n";
  const bool grid = p.lattice.kind == "angle_offset";
  out += grid ? "i,j,value\n" : "i,value\n";
  for (std::size_t idx = 0; idx < p.values.size(); ++idx) {
    if (grid) {
      const std::size_t offsets = static_cast<std::size_t>(p.lattice.offsets);
      out += std::to_string(idx / offsets) + "," + std::to_string(idx % offsets);
    } else {
      out += std::to_string(idx);
    }
    out += "," + format_number(p.values[idx]) + "\n";
  }
  return out;
}

SectionProfile parse_profile(const std::string& text) {
  Lines lines(text);
  const Json h = parse_header(lines, "funkslice-profile");
  SectionProfile p;
  try {
    p.setup.transform = parse_transform(json_get<std::string>(h, "transform"));
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
  p.setup.dim = json_get<int>(h, "n");
  p.setup.section_dim = json_get<int>(h, "k");
  try {
    p.setup.center = vector_from_json(h.at("center"));
    p.lattice = lattice_from_json(h.at("lattice"));
    quadrature_from_json(h.at("quadrature"), p.rule, p.ball_rule);
  } catch (const std::exception& e) {
    throw IoError(std::string("profile header: ") + e.what());
  }
  p.code_version = h.value("code_version", std::string());
  p.flagged = h.value("flagged", std::vector<std::size_t>{});
  const std::size_t count = json_get<std::size_t>(h, "count");
  if (count != p.lattice.size()) {
    throw IoError("profile header: count does not match the lattice");
  }
  const bool grid = p.lattice.kind == "angle_offset";
  expect_columns(lines, grid ? "i,j,value" : "i,value");
  p.values.reserve(count);
  std::string line;
  while (lines.next(line)) {
    const auto cells = split_csv(line);
    const std::size_t idx = p.values.size();
    if (grid) {
      const long offsets = p.lattice.offsets;
      if (cells.size() != 3 || parse_index(cells[0], lines.number) != static_cast<long>(idx) / offsets ||
          parse_index(cells[1], lines.number) != static_cast<long>(idx) % offsets) {
        throw IoError("profile row " + std::to_string(lines.number) + ": unexpected lattice index");
      }
    } else if (cells.size() != 2 || parse_index(cells[0], lines.number) != static_cast<long>(idx)) {
      throw IoError("profile row " + std::to_string(lines.number) + ": unexpected lattice index");
    }
    p.values.push_back(parse_number(cells.back(), lines.number));
  }
  if (p.values.size() != count) {
    throw IoError("profile body: expected " + std::to_string(count) + " rows, found " +
                  std::to_string(p.values.size()));
  }
  return p;
}

void write_profile(const fs::path& path, const SectionProfile& profile) {
  write_atomically(path, format_profile(profile));
}

SectionProfile read_profile(const fs::path& path) { return parse_profile(read_text(path)); }

std::string format_field(const FieldFile& file) {
  const SphereGrid& g = file.field.grid;
  if (file.field.values.size() != g.size()) {
    throw DomainError("format_field: value count does not match the grid");
  }
  Json header{{"format", "funkslice-field"},
              {"version", 1},
              {"n", g.dim()},
              {"grid", {{"polar", g.polar()}, {"azimuth", g.azimuth()}}},
              {"code_version", kCodeVersion},
              {"meta", file.meta}};
  std::string out = header.dump() + "\n" + grid_columns(g.dim()) + "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int idx : g.multi_index(i)) {
      out += std::to_string(idx) + ",";
    }
    out += format_number(file.field.values[i]) + "\n";
  }
  return out;
}

FieldFile parse_field(const std::string& text) {
  Lines lines(text);
  const Json h = parse_header(lines, "funkslice-field");
  const int n = json_get<int>(h, "n");
  Json grid;
  try {
    grid = h.at("grid");
  } catch (const Json::exception& e) {
    throw IoError(std::string("field header: ") + e.what());
  }
  FieldFile file{GridField{SphereGrid(n, json_get<int>(grid, "polar"), json_get<int>(grid, "azimuth")), {}},
                 h.value("meta", Json::object())};
  const SphereGrid& g = file.field.grid;
  expect_columns(lines, grid_columns(n));
  std::string line;
  while (lines.next(line)) {
    const auto cells = split_csv(line);
    const std::size_t i = file.field.values.size();
    if (cells.size() != static_cast<std::size_t>(n) + 1 || i >= g.size()) {
      throw IoError("field row " + std::to_string(lines.number) + ": unexpected shape");
    }
    const auto idx = g.multi_index(i);
    for (int l = 0; l < n; ++l) {
      if (parse_index(cells[static_cast<std::size_t>(l)], lines.number) != idx[static_cast<std::size_t>(l)]) {
        throw IoError("field row " + std::to_string(lines.number) + ": unexpected grid index");
      }
    }
    file.field.values.push_back(parse_number(cells.back(), lines.number));
  }
  if (file.field.values.size() != g.size()) {
    throw IoError("field body: row count does not match the grid");
  }
  return file;
}

void write_field(const fs::path& path, const FieldFile& file) { write_atomically(path, format_field(file)); }

FieldFile read_field(const fs::path& path) { return parse_field(read_text(path)); }

std::string format_points(const PointSet& set) {
  const int m = static_cast<int>(set.points.rows());
  if (set.values.size() != static_cast<std::size_t>(set.points.cols())) {
    throw DomainError("format_points: value count does not match the points");
  }
  Json header{{"format", "funkslice-points"},
              {"version", 1},
              {"dim", m},
              {"count", set.values.size()},
              {"code_version", kCodeVersion},
              {"meta", set.meta}};
  std::string out = header.dump() + "\n";
  for (int i = 1; i <= m; ++i) {
    out += "x" + std::to_string(i) + ",";
  }
  out += "value\n";
  for (std::size_t c = 0; c < set.values.size(); ++c) {
    for (int i = 0; i < m; ++i) {
      out += format_number(set.points(i, static_cast<Eigen::Index>(c))) + ",";
    }
    out += format_number(set.values[c]) + "\n";
  }
  return out;
}

PointSet parse_points(const std::string& text) {
  Lines lines(text);
  const Json h = parse_header(lines, "funkslice-points");
  const int m = json_get<int>(h, "dim");
  const std::size_t count = json_get<std::size_t>(h, "count");
  PointSet set;
  set.meta = h.value("meta", Json::object());
  set.points.resize(m, static_cast<Eigen::Index>(count));
  std::string cols;
  for (int i = 1; i <= m; ++i) {
    cols += "x" + std::to_string(i) + ",";
  }
  expect_columns(lines, cols + "value");
  std::string line;
  while (lines.next(line)) {
    const auto cells = split_csv(line);
    const std::size_t c = set.values.size();
    if (cells.size() != static_cast<std::size_t>(m) + 1 || c >= count) {
      throw IoError("points row " + std::to_string(lines.number) + ": unexpected shape");
    }
    for (int i = 0; i < m; ++i) {
      set.points(i, static_cast<Eigen::Index>(c)) = parse_number(cells[static_cast<std::size_t>(i)], lines.number);
    }
    set.values.push_back(parse_number(cells.back(), lines.number));
  }
  if (set.values.size() != count) {
    throw IoError("points body: row count does not match the header");
  }
  return set;
}

void write_points(const fs::path& path, const PointSet& set) { write_atomically(path, format_points(set)); }

PointSet read_points(const fs::path& path) { return parse_points(read_text(path)); }

}  // namespace funkslice
