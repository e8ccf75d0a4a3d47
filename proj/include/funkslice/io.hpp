#pragma once

// File formats: a one-line JSON header followed by a CSV body. Numbers in
// the body use 17 significant digits, so writing and reading back is exact.

#include "funkslice/fields.hpp"
#include "funkslice/profile.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace funkslice {

using Json = nlohmann::json;

/// Writes `contents` to a sibling temporary file and renames it over `path`.
/// Throws IoError on failure.
void write_atomically(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

Json lattice_to_json(const LatticeSpec& spec);
LatticeSpec lattice_from_json(const Json& j);
Json quadrature_to_json(const SectionRule& rule, const BallSectionRule& ball);
void quadrature_from_json(const Json& j, SectionRule& rule, BallSectionRule& ball);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

std::string format_profile(const SectionProfile& profile);
SectionProfile parse_profile(const std::string& text);
void write_profile(const std::filesystem::path& path, const SectionProfile& profile);
SectionProfile read_profile(const std::filesystem::path& path);

/// A sphere field with free-form metadata (symmetry class, residuals, metrics).
struct FieldFile {
  GridField field;
  Json meta = Json::object();
};

std::string format_field(const FieldFile& file);
FieldFile parse_field(const std::string& text);
void write_field(const std::filesystem::path& path, const FieldFile& file);
FieldFile read_field(const std::filesystem::path& path);

/// Scattered point values (Radon-John reconstructions on the ball).
struct PointSet {
  Matrix points;  // one point per column
  std::vector<double> values;
  Json meta = Json::object();
};

std::string format_points(const PointSet& set);
PointSet parse_points(const std::string& text);
void write_points(const std::filesystem::path& path, const PointSet& set);
PointSet read_points(const std::filesystem::path& path);

/// "%.17g" rendering used for every CSV value.
std::string format_number(double v);

}  // namespace funkslice
