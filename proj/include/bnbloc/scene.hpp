#ifndef BNBLOC_SCENE_HPP
#define BNBLOC_SCENE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"
#include "bnbloc/point_cloud.hpp"
#include "bnbloc/rng.hpp"

namespace bnbloc {

/// Parameters for the synthetic box-world generator. The defaults produce a
/// 64x64x16 m urban-ish block: a ground plane and a handful of buildings
/// with flat roofs. Tall buildings matter: wall points high above the
/// ground are what lets coarse search levels reject wrong poses early.
struct SceneSpec {
  double size_x = 64.0;
  double size_y = 64.0;
  double size_z = 16.0;
  int num_boxes = 10;
  double min_box_side = 4.0;
  double max_box_side = 14.0;
  double min_box_height = 6.0;  ///< capped at 0.9 * size_z
  double map_spacing = 0.25;    ///< surface sampling step for the map cloud
  double scan_spacing = 0.40;   ///< surface sampling step for the scan cloud
  double scan_range = 28.0;     ///< keep scan samples within this range of the sensor
  double point_jitter = 0.01;   ///< uniform per-coordinate jitter on samples
  bool tilt_noise = true;       ///< roll/pitch ground truth in [-0.01, 0.01] rad
  double gt_yaw_min = 0.0;
  double gt_yaw_max = kTwoPi;
  std::size_t min_scan_points = 400;
  double feasibility_resolution = 1.0;  ///< r for the 95%-within-r invariant
};

struct Scene {
  PointCloud map_cloud;
  PointCloud scan_cloud;  ///< sensor frame
  Pose6 gt_pose;
  std::uint64_t seed = 0;
};

namespace detail {

struct Rect {
  Point3 origin;
  Point3 du;
  Point3 dv;
};

inline void sample_rect(const Rect& r, double spacing, double jitter, Rng& rng,
                        PointCloud& out) {
  const double lu = r.du.norm();
  const double lv = r.dv.norm();
  const int nu = std::max(1, static_cast<int>(std::ceil(lu / spacing)));
  const int nv = std::max(1, static_cast<int>(std::ceil(lv / spacing)));
  for (int u = 0; u <= nu; ++u) {
    for (int v = 0; v <= nv; ++v) {
      const double fu = static_cast<double>(u) / nu;
      const double fv = static_cast<double>(v) / nv;
      out.points.push_back(
          {r.origin.x + fu * r.du.x + fv * r.dv.x + rng.uniform(-jitter, jitter),
           r.origin.y + fu * r.du.y + fv * r.dv.y + rng.uniform(-jitter, jitter),
           r.origin.z + fu * r.du.z + fv * r.dv.z + rng.uniform(-jitter, jitter)});
    }
  }
}

struct Box {
  double x0, y0, x1, y1, h;
  bool contains_xy(double x, double y, double pad) const {
    return x >= x0 - pad && x <= x1 + pad && y >= y0 - pad && y <= y1 + pad;
  }
};

inline std::vector<Rect> box_faces(const Box& b) {
  const double w = b.x1 - b.x0, d = b.y1 - b.y0;
  return {
      {{b.x0, b.y0, 0}, {w, 0, 0}, {0, 0, b.h}},  // south wall
      {{b.x0, b.y1, 0}, {w, 0, 0}, {0, 0, b.h}},  // north wall
      {{b.x0, b.y0, 0}, {0, d, 0}, {0, 0, b.h}},  // west wall
      {{b.x1, b.y0, 0}, {0, d, 0}, {0, 0, b.h}},  // east wall
      {{b.x0, b.y0, b.h}, {w, 0, 0}, {0, d, 0}},  // roof
  };
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return static_cast<std::size_t>((k.x * 73856093LL) ^ (k.y * 19349663LL) ^
                                    (k.z * 83492791LL));
  }
};

/// Grid index over points for radius queries at a fixed radius.
class NeighborGrid {
 public:
  NeighborGrid(const PointCloud& pts, double cell) : pts_(pts), cell_(cell) {
    cells_.reserve(pts.size());
    for (std::size_t i = 0; i < pts.points.size(); ++i)
      cells_[cell_of(pts.points[i])].push_back(i);
  }

  bool has_neighbor_within(const Point3& p, double radius) const {
    const CellKey c = cell_of(p);
    const double r2 = radius * radius;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) continue;
          for (const std::size_t i : it->second) {
            const Point3 d = pts_.points[i] - p;
            if (d.x * d.x + d.y * d.y + d.z * d.z <= r2) return true;
          }
        }
    return false;
  }

 private:
  CellKey cell_of(const Point3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_))};
  }

  const PointCloud& pts_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells_;
};

}  // namespace detail

/// Fraction of scan points that land within `radius` of some map point when
/// placed by the ground-truth pose.
inline double scene_overlap_fraction(const Scene& s, double radius) {
  const detail::NeighborGrid grid(s.map_cloud, radius);
  const Transform t = pose_to_transform(s.gt_pose);
  std::size_t hits = 0;
  for (const Point3& p : s.scan_cloud.points)
    if (grid.has_neighbor_within(transform_point(t, p), radius)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(s.scan_cloud.size());
}

/// Generates a deterministic synthetic scene: box-world map cloud, a
/// ground-truth sensor pose sampled clear of the buildings, and a scan
/// sampled from the same surfaces (independently of the map sampling)
/// within scan_range of the sensor, expressed in the sensor frame.
inline Scene gen_scene(const SceneSpec& spec, std::uint64_t seed) {
  if (!(spec.size_x > 0 && spec.size_y > 0 && spec.size_z > 0))
    throw ConfigError("gen_scene: dimensions must be positive");
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 1);

  // layout
  std::vector<detail::Rect> surfaces;
  surfaces.push_back({{0, 0, 0}, {spec.size_x, 0, 0}, {0, spec.size_y, 0}});  // ground
  std::vector<detail::Box> boxes;
  const double max_h = 0.9 * spec.size_z;
  for (int i = 0; i < spec.num_boxes; ++i) {
    // footprints clipped so boxes fit inside the map with a 1 m margin
    const double w =
        std::min(rng.uniform(spec.min_box_side, spec.max_box_side), spec.size_x - 2.5);
    const double d =
        std::min(rng.uniform(spec.min_box_side, spec.max_box_side), spec.size_y - 2.5);
    const double h = rng.uniform(std::min(spec.min_box_height, max_h), max_h);
    const double x0 = rng.uniform(1.0, std::max(1.0 + 1e-6, spec.size_x - w - 1.0));
    const double y0 = rng.uniform(1.0, std::max(1.0 + 1e-6, spec.size_y - d - 1.0));
    const detail::Box b{x0, y0, x0 + w, y0 + d, h};
    boxes.push_back(b);
    for (const auto& f : detail::box_faces(b)) surfaces.push_back(f);
  }

  Scene scene;
  scene.seed = seed;
  for (const auto& s : surfaces)
    detail::sample_rect(s, spec.map_spacing, spec.point_jitter, rng, scene.map_cloud);

  // scan surface samples in the world frame, independent of the map samples
  PointCloud world_scan;
  for (const auto& s : surfaces)
    detail::sample_rect(s, spec.scan_spacing, spec.point_jitter, rng, world_scan);

  for (int attempt = 0; attempt < 64; ++attempt) {
    Pose6 gt;
    gt.x = rng.uniform(0.12 * spec.size_x, 0.88 * spec.size_x);
    gt.y = rng.uniform(0.12 * spec.size_y, 0.88 * spec.size_y);
    gt.z = rng.uniform(1.2, 2.2);
    gt.yaw = normalize_angle(rng.uniform(spec.gt_yaw_min, spec.gt_yaw_max));
    if (spec.tilt_noise) {
      gt.roll = rng.uniform(-0.01, 0.01);
      gt.pitch = rng.uniform(-0.01, 0.01);
    }

    bool inside = false;
    for (const auto& b : boxes)
      if (b.contains_xy(gt.x, gt.y, 1.0)) inside = true;
    if (inside) continue;

    scene.gt_pose = gt;
    scene.scan_cloud.points.clear();
    const Transform to_sensor = pose_to_transform(gt).inverse();
    const Point3 sensor{gt.x, gt.y, gt.z};
    for (const Point3& w : world_scan.points) {
      if ((w - sensor).norm() > spec.scan_range) continue;
      scene.scan_cloud.points.push_back(transform_point(to_sensor, w));
    }
    if (scene.scan_cloud.size() < spec.min_scan_points) continue;

    if (scene_overlap_fraction(scene, spec.feasibility_resolution) >= 0.95) return scene;
  }
  throw InfeasiblePoseError("gen_scene: no feasible pose found in 64 attempts (seed " +
                            std::to_string(seed) + ")");
}

}  // namespace bnbloc

#endif  // BNBLOC_SCENE_HPP
