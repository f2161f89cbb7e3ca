#ifndef BNBLOC_NODES_HPP
#define BNBLOC_NODES_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "bnbloc/angular_grid.hpp"
#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"
#include "bnbloc/point_cloud.hpp"

namespace bnbloc {

/// A pose hypothesis cell: discrete translation indices (on the grid
/// 2^level * r), rotational indices into the AngularGrid, and the tree
/// level. `score` is set by batch evaluation; -1 means not yet evaluated.
struct Node {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  std::int32_t iz = 0;
  std::int32_t iroll = 0;
  std::int32_t ipitch = 0;
  std::int32_t iyaw = 0;
  std::int32_t level = 0;
  std::int32_t score = -1;

  bool is_leaf() const { return level == 0; }
};

/// Continuous pose of a node: translation index * (2^level * r) per axis,
/// rotation w_min + step(level) * index per axis.
inline Pose6 node_pose(const Node& c, const AngularGrid& grids, double min_resolution) {
  const double cell = std::ldexp(min_resolution, c.level);
  Pose6 p;
  p.x = cell * static_cast<double>(c.ix);
  p.y = cell * static_cast<double>(c.iy);
  p.z = cell * static_cast<double>(c.iz);
  p.roll = grids.axis(0, c.level).angle(c.iroll);
  p.pitch = grids.axis(1, c.level).angle(c.ipitch);
  p.yaw = grids.axis(2, c.level).angle(c.iyaw);
  return p;
}

struct TransIndexRange {
  std::int32_t min = 0;
  std::int32_t max = 0;  // inclusive
  std::int64_t count() const { return static_cast<std::int64_t>(max) - min + 1; }
};

/// Translational index interval [floor(w_min / cell), ceil(w_max / cell)]
/// at the root level.
inline TransIndexRange trans_index_range(double w_min, double w_max, double cell) {
  return {static_cast<std::int32_t>(std::floor(w_min / cell)),
          static_cast<std::int32_t>(std::ceil(w_max / cell))};
}

/// The root-level node set: the direct product of the translational index
/// intervals and the rotational index grids.
inline std::vector<Node> initial_nodes(const Aabb& trans_range, const AngularGrid& grids,
                                       double min_resolution) {
  const int l = grids.max_level();
  const double cell = std::ldexp(min_resolution, l);
  const TransIndexRange rx = trans_index_range(trans_range.min.x, trans_range.max.x, cell);
  const TransIndexRange ry = trans_index_range(trans_range.min.y, trans_range.max.y, cell);
  const TransIndexRange rz = trans_index_range(trans_range.min.z, trans_range.max.z, cell);
  const int nroll = grids.axis(0, l).index_count();
  const int npitch = grids.axis(1, l).index_count();
  const int nyaw = grids.axis(2, l).index_count();

  const std::int64_t total =
      rx.count() * ry.count() * rz.count() * nroll * npitch * nyaw;
  if (total <= 0) throw EmptySearchSpaceError("initial node set is empty");

  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(total));
  for (std::int32_t ix = rx.min; ix <= rx.max; ++ix)
    for (std::int32_t iy = ry.min; iy <= ry.max; ++iy)
      for (std::int32_t iz = rz.min; iz <= rz.max; ++iz)
        for (std::int32_t ir = 0; ir < nroll; ++ir)
          for (std::int32_t ip = 0; ip < npitch; ++ip)
            for (std::int32_t iw = 0; iw < nyaw; ++iw)
              nodes.push_back({ix, iy, iz, ir, ip, iw, l, -1});
  return nodes;
}

/// Splits a non-leaf node into its children one level down: translational
/// indices 2c+j (j in {0,1}, eight combinations) and rotational indices
/// a*c+j (j in 0..a-1) where a is the per-axis division count. Children
/// whose rotational index leaves the grid are dropped.
inline std::vector<Node> branch(const Node& c, const AngularGrid& grids) {
  if (c.level <= 0) throw ConfigError("branch: leaf nodes cannot be branched");
  const int child_level = c.level - 1;
  const int a_roll = grids.divisions(0, c.level);
  const int a_pitch = grids.divisions(1, c.level);
  const int a_yaw = grids.divisions(2, c.level);
  const int max_roll = grids.axis(0, child_level).max_index();
  const int max_pitch = grids.axis(1, child_level).max_index();
  const int max_yaw = grids.axis(2, child_level).max_index();

  std::vector<Node> children;
  children.reserve(static_cast<std::size_t>(8 * a_roll * a_pitch * a_yaw));
  for (std::int32_t jr = 0; jr < a_roll; ++jr) {
    const std::int32_t iroll = a_roll * c.iroll + jr;
    if (iroll > max_roll) break;
    for (std::int32_t jp = 0; jp < a_pitch; ++jp) {
      const std::int32_t ipitch = a_pitch * c.ipitch + jp;
      if (ipitch > max_pitch) break;
      for (std::int32_t jw = 0; jw < a_yaw; ++jw) {
        const std::int32_t iyaw = a_yaw * c.iyaw + jw;
        if (iyaw > max_yaw) break;
        for (std::int32_t jx = 0; jx <= 1; ++jx)
          for (std::int32_t jy = 0; jy <= 1; ++jy)
            for (std::int32_t jz = 0; jz <= 1; ++jz)
              children.push_back({2 * c.ix + jx, 2 * c.iy + jy, 2 * c.iz + jz,
                                  iroll, ipitch, iyaw, child_level, -1});
      }
    }
  }
  return children;
}

}  // namespace bnbloc

#endif  // BNBLOC_NODES_HPP
