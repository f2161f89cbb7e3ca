#ifndef BNBLOC_CLOUD_IO_HPP
#define BNBLOC_CLOUD_IO_HPP

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/point_cloud.hpp"

namespace bnbloc {

enum class CloudFormat { kAuto, kPly, kPcd, kXyz };

struct LoadResult {
  PointCloud cloud;
  std::size_t dropped_non_finite = 0;
};

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

// Reads one x/y/z row given per-column indices; returns false for rows whose
// coordinates are NaN/Inf (dropped by the caller).
inline bool row_to_point(const std::vector<std::string>& cols, int ix, int iy, int iz,
                         const std::string& path, std::size_t line_no, Point3& p) {
  const int needed = std::max({ix, iy, iz}) + 1;
  if (static_cast<int>(cols.size()) < needed)
    throw ParseError(path, line_no, "expected at least " + std::to_string(needed) +
                                        " columns, got " + std::to_string(cols.size()));
  double v[3];
  const int idx[3] = {ix, iy, iz};
  for (int k = 0; k < 3; ++k) {
    if (!parse_double(cols[static_cast<std::size_t>(idx[k])], v[k]))
      throw ParseError(path, line_no, "not a number: '" + cols[static_cast<std::size_t>(idx[k])] + "'");
  }
  p = {v[0], v[1], v[2]};
  return p.finite();
}

inline LoadResult load_ply_ascii(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t vertex_count = 0;
  bool in_vertex_element = false;
  bool seen_vertex_element = false;
  int prop_index = 0;
  int ix = -1, iy = -1, iz = -1;

  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++line_no;
  if (split_ws(line) != std::vector<std::string>{"ply"})
    throw ParseError(path, line_no, "missing 'ply' magic");

  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cols = split_ws(line);
    if (cols.empty()) continue;
    if (cols[0] == "comment") continue;
    if (cols[0] == "format") {
      if (cols.size() < 2 || cols[1] != "ascii")
        throw ParseError(path, line_no, "only 'format ascii 1.0' is supported");
    } else if (cols[0] == "element") {
      if (cols.size() < 3) throw ParseError(path, line_no, "malformed element line");
      in_vertex_element = (cols[1] == "vertex");
      if (in_vertex_element) {
        seen_vertex_element = true;
        vertex_count = static_cast<std::size_t>(std::stoull(cols[2]));
        prop_index = 0;
      }
    } else if (cols[0] == "property") {
      if (!in_vertex_element) continue;
      if (cols.size() >= 3 && cols[1] != "list") {
        const std::string name = lower(cols[2]);
        if (name == "x") ix = prop_index;
        if (name == "y") iy = prop_index;
        if (name == "z") iz = prop_index;
      }
      ++prop_index;
    } else if (cols[0] == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError(path, line_no, "missing end_header");
  if (!seen_vertex_element) throw ParseError(path, line_no, "no vertex element");
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path, line_no, "vertex element lacks x/y/z properties");

  LoadResult res;
  res.cloud.points.reserve(vertex_count);
  std::size_t rows = 0;
  while (rows < vertex_count && std::getline(in, line)) {
    ++line_no;
    const auto cols = split_ws(line);
    if (cols.empty()) continue;
    Point3 p;
    if (row_to_point(cols, ix, iy, iz, path, line_no, p))
      res.cloud.points.push_back(p);
    else
      ++res.dropped_non_finite;
    ++rows;
  }
  if (rows < vertex_count)
    throw ParseError(path, line_no, "expected " + std::to_string(vertex_count) +
                                        " vertex rows, got " + std::to_string(rows));
  return res;
}

inline LoadResult load_pcd_ascii(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  std::size_t point_count = 0;
  bool have_points = false;
  bool data_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto cols = split_ws(line);
    if (cols.empty() || cols[0][0] == '#') continue;
    const std::string key = lower(cols[0]);
    if (key == "fields") {
      fields.assign(cols.begin() + 1, cols.end());
    } else if (key == "points") {
      if (cols.size() < 2) throw ParseError(path, line_no, "malformed POINTS line");
      point_count = static_cast<std::size_t>(std::stoull(cols[1]));
      have_points = true;
    } else if (key == "width" && !have_points) {
      if (cols.size() >= 2) point_count = static_cast<std::size_t>(std::stoull(cols[1]));
    } else if (key == "data") {
      if (cols.size() < 2 || lower(cols[1]) != "ascii")
        throw ParseError(path, line_no, "only DATA ascii is supported");
      data_seen = true;
      break;
    }
  }
  if (!data_seen) throw ParseError(path, line_no, "missing DATA line");

  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string f = lower(fields[i]);
    if (f == "x") ix = static_cast<int>(i);
    if (f == "y") iy = static_cast<int>(i);
    if (f == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path, line_no, "FIELDS must contain x y z");

  LoadResult res;
  res.cloud.points.reserve(point_count);
  std::size_t rows = 0;
  while (rows < point_count && std::getline(in, line)) {
    ++line_no;
    const auto cols = split_ws(line);
    if (cols.empty()) continue;
    Point3 p;
    if (row_to_point(cols, ix, iy, iz, path, line_no, p))
      res.cloud.points.push_back(p);
    else
      ++res.dropped_non_finite;
    ++rows;
  }
  if (rows < point_count)
    throw ParseError(path, line_no, "expected " + std::to_string(point_count) +
                                        " data rows, got " + std::to_string(rows));
  return res;
}

inline LoadResult load_xyz(std::istream& in, const std::string& path) {
  LoadResult res;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cols = split_ws(line);
    if (cols.empty() || cols[0][0] == '#') continue;
    Point3 p;
    if (row_to_point(cols, 0, 1, 2, path, line_no, p))
      res.cloud.points.push_back(p);
    else
      ++res.dropped_non_finite;
  }
  return res;
}

}  // namespace detail

inline CloudFormat guess_format(const std::string& path) {
  const std::string ext = detail::lower(std::filesystem::path(path).extension().string());
  if (ext == ".ply") return CloudFormat::kPly;
  if (ext == ".pcd") return CloudFormat::kPcd;
  return CloudFormat::kXyz;
}

/// Loads a point cloud from ASCII PLY, ASCII PCD or whitespace XYZ text.
/// Non-finite rows are dropped and counted; an entirely empty result throws.
inline LoadResult load_cloud(const std::string& path,
                             CloudFormat format = CloudFormat::kAuto) {
  if (!std::filesystem::exists(path)) throw FileNotFoundError(path);
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);

  if (format == CloudFormat::kAuto) format = guess_format(path);
  LoadResult res;
  switch (format) {
    case CloudFormat::kPly:
      res = detail::load_ply_ascii(in, path);
      break;
    case CloudFormat::kPcd:
      res = detail::load_pcd_ascii(in, path);
      break;
    default:
      res = detail::load_xyz(in, path);
      break;
  }
  if (res.cloud.empty()) throw EmptyCloudError(path + ": no finite points");
  return res;
}

/// Writes one "x y z" row per point. Round-trips coordinates to well below
/// 1e-6 m via %.17g.
inline void save_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  char buf[128];
  for (const Point3& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bnbloc

#endif  // BNBLOC_CLOUD_IO_HPP
