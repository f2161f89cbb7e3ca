#ifndef BNBLOC_ORACLE_HPP
#define BNBLOC_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bnbloc/angular_grid.hpp"
#include "bnbloc/errors.hpp"
#include "bnbloc/nodes.hpp"
#include "bnbloc/search.hpp"
#include "bnbloc/search_config.hpp"
#include "bnbloc/voxel_map.hpp"

namespace bnbloc {

struct OracleResult {
  int best_score = 0;
  std::vector<Pose6> argmax_poses;  ///< every leaf attaining best_score
  std::uint64_t leaf_count = 0;
};

inline constexpr std::uint64_t kOracleMaxLeaves = 100000000;  // 1e8 guard

/// Exhaustive reference: scores every level-0 node of the exact
/// discretization the branch-and-bound search explores (the leaf
/// descendants of the root index ranges, times the level-0 rotation grid).
/// Independent of the search loop: plain block enumeration, no pruning.
inline OracleResult oracle_search(const MultiResVoxelMap& map, const PointCloud& scan,
                                  const SearchConfig& cfg) {
  if (scan.empty()) throw DegenerateScanError("oracle_search: empty scan");
  if (map.min_resolution() != cfg.min_resolution)
    throw ConfigError("oracle_search: config r does not match the map");
  const double d_max = cfg.d_max ? *cfg.d_max : max_range(scan);
  if (!(d_max > 0.0)) throw DegenerateScanError("oracle_search: zero scan range");

  const AngularGrid grids(cfg, d_max);
  const Aabb range = cfg.translation_range ? *cfg.translation_range : map.bbox();
  const double root_cell = std::ldexp(cfg.min_resolution, cfg.max_level);
  const std::int64_t scale = std::int64_t{1} << cfg.max_level;

  const TransIndexRange rx = trans_index_range(range.min.x, range.max.x, root_cell);
  const TransIndexRange ry = trans_index_range(range.min.y, range.max.y, root_cell);
  const TransIndexRange rz = trans_index_range(range.min.z, range.max.z, root_cell);
  const std::int64_t x_lo = rx.min * scale, x_hi = (rx.max + 1) * scale;  // [lo, hi)
  const std::int64_t y_lo = ry.min * scale, y_hi = (ry.max + 1) * scale;
  const std::int64_t z_lo = rz.min * scale, z_hi = (rz.max + 1) * scale;
  const std::int64_t nroll = grids.axis(0, 0).index_count();
  const std::int64_t npitch = grids.axis(1, 0).index_count();
  const std::int64_t nyaw = grids.axis(2, 0).index_count();

  const std::uint64_t total = static_cast<std::uint64_t>(x_hi - x_lo) *
                              static_cast<std::uint64_t>(y_hi - y_lo) *
                              static_cast<std::uint64_t>(z_hi - z_lo) *
                              static_cast<std::uint64_t>(nroll * npitch * nyaw);
  if (total == 0) throw EmptySearchSpaceError("oracle_search: empty leaf grid");
  if (total > kOracleMaxLeaves)
    throw TooLargeError("oracle_search: leaf grid of " + std::to_string(total) +
                        " nodes exceeds the 1e8 guard");

  OracleResult out;
  out.leaf_count = total;
  out.best_score = -1;

  const std::size_t block_size = 1 << 18;
  std::vector<Node> block;
  block.reserve(block_size);
  const auto drain = [&] {
    batch_evaluate(block, map, scan, grids, cfg.workers);
    for (const Node& n : block) {
      if (n.score > out.best_score) {
        out.best_score = n.score;
        out.argmax_poses.clear();
      }
      if (n.score == out.best_score)
        out.argmax_poses.push_back(node_pose(n, grids, cfg.min_resolution).normalized());
    }
    block.clear();
  };

  for (std::int64_t ix = x_lo; ix < x_hi; ++ix)
    for (std::int64_t iy = y_lo; iy < y_hi; ++iy)
      for (std::int64_t iz = z_lo; iz < z_hi; ++iz)
        for (std::int64_t ir = 0; ir < nroll; ++ir)
          for (std::int64_t ip = 0; ip < npitch; ++ip)
            for (std::int64_t iw = 0; iw < nyaw; ++iw) {
              block.push_back({static_cast<std::int32_t>(ix), static_cast<std::int32_t>(iy),
                               static_cast<std::int32_t>(iz), static_cast<std::int32_t>(ir),
                               static_cast<std::int32_t>(ip), static_cast<std::int32_t>(iw),
                               0, -1});
              if (block.size() == block_size) drain();
            }
  if (!block.empty()) drain();
  return out;
}

}  // namespace bnbloc

#endif  // BNBLOC_ORACLE_HPP
