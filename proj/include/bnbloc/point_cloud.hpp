#ifndef BNBLOC_POINT_CLOUD_HPP
#define BNBLOC_POINT_CLOUD_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"

namespace bnbloc {

struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Axis-aligned bounding box; min <= max componentwise.
struct Aabb {
  Point3 min;
  Point3 max;

  Point3 extent() const { return max - min; }
  bool contains(const Point3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
};

/// Integer voxel index of a coordinate at the given cell size, true floor
/// (negative coordinates round toward -inf). Shared by the voxel filter and
/// the occupancy maps so both discretize identically.
inline std::int32_t voxel_index(double coord, double cell) {
  return static_cast<std::int32_t>(std::floor(coord / cell));
}

inline Aabb bounding_box(const PointCloud& c) {
  if (c.empty()) throw EmptyCloudError("bounding_box: empty cloud");
  Aabb box{c.points.front(), c.points.front()};
  for (const Point3& p : c.points) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.min.z = std::min(box.min.z, p.z);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
    box.max.z = std::max(box.max.z, p.z);
  }
  return box;
}

/// Maximum point norm; the scan is expected in the sensor frame, so this is
/// the maximum scan range.
inline double max_range(const PointCloud& c) {
  if (c.empty()) throw EmptyCloudError("max_range: empty cloud");
  double m = 0.0;
  for (const Point3& p : c.points) m = std::max(m, p.norm());
  return m;
}

namespace detail {

struct VoxelAccum {
  std::int64_t vx, vy, vz;
  double sx, sy, sz;
  std::uint32_t count;
};

}  // namespace detail

/// Voxel-grid filter: one centroid per occupied voxel of size `leaf`.
/// Output order is ascending lexicographic voxel coordinate, which makes the
/// result independent of input order.
inline PointCloud voxel_grid_downsample(const PointCloud& c, double leaf) {
  if (c.empty()) throw EmptyCloudError("voxel_grid_downsample: empty cloud");
  if (!(leaf > 0.0)) throw ConfigError("voxel_grid_downsample: leaf must be > 0");

  std::vector<detail::VoxelAccum> cells;
  cells.reserve(c.size());
  for (const Point3& p : c.points) {
    cells.push_back({static_cast<std::int64_t>(std::floor(p.x / leaf)),
                     static_cast<std::int64_t>(std::floor(p.y / leaf)),
                     static_cast<std::int64_t>(std::floor(p.z / leaf)),
                     p.x, p.y, p.z, 1});
  }
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    return std::tie(a.vx, a.vy, a.vz) < std::tie(b.vx, b.vy, b.vz);
  });

  PointCloud out;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i + 1;
    double sx = cells[i].sx, sy = cells[i].sy, sz = cells[i].sz;
    while (j < cells.size() && cells[j].vx == cells[i].vx &&
           cells[j].vy == cells[i].vy && cells[j].vz == cells[i].vz) {
      sx += cells[j].sx;
      sy += cells[j].sy;
      sz += cells[j].sz;
      ++j;
    }
    const double n = static_cast<double>(j - i);
    out.points.push_back({sx / n, sy / n, sz / n});
    i = j;
  }
  return out;
}

/// Number of occupied voxels at the given leaf size (the size the voxel
/// filter would output), without materializing centroids.
inline std::size_t count_voxels(const PointCloud& c, double leaf) {
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> v;
  v.reserve(c.size());
  for (const Point3& p : c.points) {
    v.emplace_back(static_cast<std::int64_t>(std::floor(p.x / leaf)),
                   static_cast<std::int64_t>(std::floor(p.y / leaf)),
                   static_cast<std::int64_t>(std::floor(p.z / leaf)));
  }
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

struct AutoLeafResult {
  double leaf = 0.0;
  std::size_t count = 0;
  /// False when the bisection could not bring the count into
  /// [target/2, 2*target] within 32 iterations (best-effort leaf returned).
  bool converged = true;
};

/// Picks a voxel filter leaf size so the downsampled count lands within
/// [target/2, 2*target], by bisection on the leaf size.
inline AutoLeafResult auto_leaf(const PointCloud& c, std::size_t target_points) {
  if (c.empty()) throw EmptyCloudError("auto_leaf: empty cloud");
  if (target_points < 1) throw ConfigError("auto_leaf: target must be >= 1");

  const std::size_t lo_count =
      std::max<std::size_t>(1, (target_points + 1) / 2);
  const std::size_t hi_count = 2 * target_points;

  const Aabb box = bounding_box(c);
  const Point3 ext = box.extent();
  const double max_ext = std::max({ext.x, ext.y, ext.z, 1e-9});

  double lo = max_ext / (1 << 24);  // fine enough that nothing merges
  double hi = max_ext;

  // Clouds already at or below target: the smallest probed leaf keeps them.
  {
    const std::size_t n = count_voxels(c, lo);
    if (n <= hi_count && (n >= lo_count || n == c.size())) {
      return {lo, n, true};
    }
  }

  double best_leaf = lo;
  std::size_t best_count = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 32; ++iter) {
    const double mid = std::sqrt(lo * hi);
    const std::size_t n = count_voxels(c, mid);
    if (n >= lo_count && n <= hi_count) return {mid, n, true};
    const double gap = std::abs(
        std::log(static_cast<double>(std::max<std::size_t>(n, 1))) -
        std::log(static_cast<double>(target_points)));
    if (gap < best_gap) {
      best_gap = gap;
      best_leaf = mid;
      best_count = n;
    }
    if (n > hi_count) {
      lo = mid;  // too many points: larger leaf
    } else {
      hi = mid;
    }
  }
  return {best_leaf, best_count, false};
}

}  // namespace bnbloc

#endif  // BNBLOC_POINT_CLOUD_HPP
