#ifndef BNBLOC_PIPELINE_HPP
#define BNBLOC_PIPELINE_HPP

#include <chrono>
#include <cstddef>

#include "bnbloc/point_cloud.hpp"
#include "bnbloc/search.hpp"
#include "bnbloc/search_config.hpp"
#include "bnbloc/voxel_map.hpp"

namespace bnbloc {

struct SourcePrep {
  PointCloud scan;        ///< scan actually used for scoring
  double leaf = 0.0;      ///< voxel filter leaf (0 when no downsampling ran)
  bool leaf_converged = true;
  double d_max = 0.0;     ///< maximum range of the prepared scan
  double elapsed_ms = 0.0;
};

/// "Set source point cloud" step: voxel-downsample the raw scan toward
/// `target_points` (skipped when the scan is already at or below target)
/// and compute its maximum range.
inline SourcePrep prepare_source(const PointCloud& raw_scan, std::size_t target_points) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  SourcePrep prep;
  if (target_points > 0 && raw_scan.size() > target_points) {
    const AutoLeafResult leaf = auto_leaf(raw_scan, target_points);
    prep.scan = voxel_grid_downsample(raw_scan, leaf.leaf);
    prep.leaf = leaf.leaf;
    prep.leaf_converged = leaf.converged;
  } else {
    prep.scan = raw_scan;
  }
  prep.d_max = max_range(prep.scan);
  prep.elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return prep;
}

/// Full localization step against a prebuilt map: prepare the source scan,
/// run the search, and record the preparation time in the stats.
inline SearchResult localize_scan(const MultiResVoxelMap& map, const PointCloud& raw_scan,
                                  const SearchConfig& cfg, std::size_t downsample_target) {
  const SourcePrep prep = prepare_source(raw_scan, downsample_target);
  SearchResult result = search(map, prep.scan, cfg);
  result.stats.set_source_ms = prep.elapsed_ms;
  return result;
}

}  // namespace bnbloc

#endif  // BNBLOC_PIPELINE_HPP
