#ifndef BNBLOC_VOXEL_MAP_HPP
#define BNBLOC_VOXEL_MAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"
#include "bnbloc/point_cloud.hpp"

namespace bnbloc {

/// Signed voxel index triple. Indices are floor(coordinate / cell_size),
/// true floor for negatives.
struct VoxelCoord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend bool operator==(const VoxelCoord& a, const VoxelCoord& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
  friend bool operator<(const VoxelCoord& a, const VoxelCoord& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  }
};

inline VoxelCoord voxel_of(const Point3& p, double cell) {
  return {voxel_index(p.x, cell), voxel_index(p.y, cell), voxel_index(p.z, cell)};
}

/// Three-prime XOR hash over 64-bit wrapping arithmetic.
inline std::uint64_t voxel_hash(const VoxelCoord& v) {
  const std::uint64_t hx =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(v.x)) * 73856093ULL;
  const std::uint64_t hy =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(v.y)) * 19349663ULL;
  const std::uint64_t hz =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(v.z)) * 83492791ULL;
  return hx ^ hy ^ hz;
}

/// Bucket index of a voxel in a table of `bucket_count` slots.
inline std::uint64_t spatial_hash(const VoxelCoord& v, std::uint64_t bucket_count) {
  return voxel_hash(v) % bucket_count;
}

/// One resolution level of the occupancy map: an open-addressed hash set of
/// occupied voxel coordinates with linear probing. Build-once, no deletion;
/// after construction the table is immutable and safe for concurrent reads.
class LevelMap {
 public:
  /// Default per-level memory cap for the bucket array.
  static constexpr std::size_t kDefaultMemoryCapBytes = std::size_t{2} << 30;

  LevelMap() = default;

  /// Builds a level from an already-deduplicated voxel list (no inflation).
  /// The bucket count starts at the next power of two >= 4x occupancy and
  /// doubles until the measured primary-collision rate (inserts whose home
  /// bucket held a key with a different 64-bit hash) is at or below
  /// `collision_target`. Keys whose full hashes tie exactly are excluded
  /// from the rate: the XOR hash has intrinsic ties (e.g. mirrored
  /// coordinates with two odd components), and no table size separates
  /// those, so counting them would make the loop diverge.
  static LevelMap from_voxels(std::vector<VoxelCoord> voxels, int level,
                              double resolution, double collision_target,
                              std::size_t memory_cap_bytes = kDefaultMemoryCapBytes) {
    std::sort(voxels.begin(), voxels.end());
    voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());

    LevelMap m;
    m.level_ = level;
    m.resolution_ = resolution;
    m.occupied_count_ = voxels.size();
    if (voxels.empty()) {
      m.buckets_.assign(kMinBuckets, kEmpty);
      m.mask_ = kMinBuckets - 1;
      return m;
    }

    std::uint64_t buckets = kMinBuckets;
    while (buckets < 4 * voxels.size()) buckets <<= 1;
    for (;;) {
      if (buckets * sizeof(VoxelCoord) > memory_cap_bytes)
        throw CapacityExceededError(
            "level " + std::to_string(level) + ": bucket table of " +
            std::to_string(buckets) + " slots exceeds memory cap of " +
            std::to_string(memory_cap_bytes) + " bytes");
      m.buckets_.assign(buckets, kEmpty);
      m.mask_ = buckets - 1;
      std::size_t collisions = 0;
      for (const VoxelCoord& v : voxels) {
        const std::uint64_t h = voxel_hash(v);
        std::uint64_t idx = h & m.mask_;
        if (!(m.buckets_[idx] == kEmpty)) {
          if (voxel_hash(m.buckets_[idx]) != h) ++collisions;
          do {
            idx = (idx + 1) & m.mask_;
          } while (!(m.buckets_[idx] == kEmpty));
        }
        m.buckets_[idx] = v;
      }
      m.collision_rate_ =
          static_cast<double>(collisions) / static_cast<double>(voxels.size());
      if (m.collision_rate_ <= collision_target) break;
      buckets <<= 1;
    }
    return m;
  }

  int level() const { return level_; }
  double resolution() const { return resolution_; }
  std::size_t occupied_count() const { return occupied_count_; }
  std::uint64_t bucket_count() const { return buckets_.size(); }
  double collision_rate() const { return collision_rate_; }
  double load_factor() const {
    return static_cast<double>(occupied_count_) / static_cast<double>(buckets_.size());
  }

  bool contains(const VoxelCoord& v) const {
    std::uint64_t idx = voxel_hash(v) & mask_;
    for (;;) {
      const VoxelCoord& slot = buckets_[idx];
      if (slot == kEmpty) return false;
      if (slot == v) return true;
      idx = (idx + 1) & mask_;
    }
  }

  /// Binary occupancy of the voxel containing `p`.
  int lookup(const Point3& p) const { return contains(voxel_of(p, resolution_)) ? 1 : 0; }

  /// Scan matching score: number of scan points whose transformed position
  /// falls into an occupied voxel.
  int score(const Transform& t, const PointCloud& scan) const {
    const auto& r = t.rotation;
    const Point3& tr = t.translation;
    const double cell = resolution_;
    int s = 0;
    for (const Point3& p : scan.points) {
      const double qx = r[0] * p.x + r[1] * p.y + r[2] * p.z + tr.x;
      const double qy = r[3] * p.x + r[4] * p.y + r[5] * p.z + tr.y;
      const double qz = r[6] * p.x + r[7] * p.y + r[8] * p.z + tr.z;
      s += contains({voxel_index(qx, cell), voxel_index(qy, cell), voxel_index(qz, cell)});
    }
    return s;
  }

  /// Occupied voxels in ascending coordinate order (canonical form used by
  /// serialization and the reference-set tests).
  std::vector<VoxelCoord> occupied_voxels() const {
    std::vector<VoxelCoord> out;
    out.reserve(occupied_count_);
    for (const VoxelCoord& v : buckets_)
      if (!(v == kEmpty)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  // Sentinel for empty slots; legal voxel indices never reach INT32_MIN.
  static constexpr VoxelCoord kEmpty{std::numeric_limits<std::int32_t>::min(),
                                     std::numeric_limits<std::int32_t>::min(),
                                     std::numeric_limits<std::int32_t>::min()};
  static constexpr std::uint64_t kMinBuckets = 16;

  int level_ = 0;
  double resolution_ = 1.0;
  std::vector<VoxelCoord> buckets_;
  std::uint64_t mask_ = 0;
  std::size_t occupied_count_ = 0;
  double collision_rate_ = 0.0;
};

/// Voxelizes map points at 2^level * min_resolution and inflates each
/// occupied voxel v with the eight offsets v - j, j in {0,1}^3. The
/// inflation makes a node's score at this level an upper bound on the
/// scores of its translational children one level below.
inline std::vector<VoxelCoord> inflated_voxels(const PointCloud& points, int level,
                                               double min_resolution) {
  const double cell = std::ldexp(min_resolution, level);
  std::vector<VoxelCoord> sources;
  sources.reserve(points.size());
  for (const Point3& p : points.points) sources.push_back(voxel_of(p, cell));
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<VoxelCoord> out;
  out.reserve(sources.size() * 8);
  for (const VoxelCoord& v : sources) {
    for (std::int32_t jx = 0; jx <= 1; ++jx)
      for (std::int32_t jy = 0; jy <= 1; ++jy)
        for (std::int32_t jz = 0; jz <= 1; ++jz)
          out.push_back({v.x - jx, v.y - jy, v.z - jz});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Builds one level of the multi-resolution map from raw map points.
inline LevelMap build_level(const PointCloud& points, int level, double min_resolution,
                            double collision_target,
                            std::size_t memory_cap_bytes = LevelMap::kDefaultMemoryCapBytes) {
  if (points.empty()) throw EmptyCloudError("build_level: empty cloud");
  return LevelMap::from_voxels(inflated_voxels(points, level, min_resolution), level,
                               std::ldexp(min_resolution, level), collision_target,
                               memory_cap_bytes);
}

/// Hierarchy of sparse-hash occupancy maps, levels 0..max_level with voxel
/// size 2^l * min_resolution. Immutable after construction.
class MultiResVoxelMap {
 public:
  static constexpr double kDefaultCollisionTarget = 0.001;

  MultiResVoxelMap() = default;

  static MultiResVoxelMap build(const PointCloud& map_points, double min_resolution,
                                int max_level,
                                double collision_target = kDefaultCollisionTarget,
                                std::size_t memory_cap_bytes = LevelMap::kDefaultMemoryCapBytes) {
    if (map_points.empty()) throw EmptyCloudError("MultiResVoxelMap: empty map");
    if (max_level < 1) throw ConfigError("MultiResVoxelMap: max_level must be >= 1");
    if (!(min_resolution > 0.0))
      throw ConfigError("MultiResVoxelMap: min_resolution must be > 0");

    MultiResVoxelMap m;
    m.min_resolution_ = min_resolution;
    m.max_level_ = max_level;
    m.bbox_ = bounding_box(map_points);
    m.levels_.reserve(static_cast<std::size_t>(max_level) + 1);
    for (int l = 0; l <= max_level; ++l)
      m.levels_.push_back(
          build_level(map_points, l, min_resolution, collision_target, memory_cap_bytes));
    return m;
  }

  /// Assembles a map from per-level voxel lists (used by deserialization).
  static MultiResVoxelMap from_levels(std::vector<std::vector<VoxelCoord>> per_level,
                                      double min_resolution, const Aabb& bbox,
                                      double collision_target = kDefaultCollisionTarget,
                                      std::size_t memory_cap_bytes = LevelMap::kDefaultMemoryCapBytes) {
    if (per_level.size() < 2) throw FormatError("map must have at least 2 levels");
    MultiResVoxelMap m;
    m.min_resolution_ = min_resolution;
    m.max_level_ = static_cast<int>(per_level.size()) - 1;
    m.bbox_ = bbox;
    for (int l = 0; l < static_cast<int>(per_level.size()); ++l)
      m.levels_.push_back(LevelMap::from_voxels(std::move(per_level[static_cast<std::size_t>(l)]),
                                                l, std::ldexp(min_resolution, l),
                                                collision_target, memory_cap_bytes));
    return m;
  }

  double min_resolution() const { return min_resolution_; }
  int max_level() const { return max_level_; }
  const Aabb& bbox() const { return bbox_; }
  const LevelMap& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
  const std::vector<LevelMap>& levels() const { return levels_; }

 private:
  double min_resolution_ = 1.0;
  int max_level_ = 0;
  Aabb bbox_;
  std::vector<LevelMap> levels_;
};

}  // namespace bnbloc

#endif  // BNBLOC_VOXEL_MAP_HPP
