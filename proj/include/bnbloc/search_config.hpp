#ifndef BNBLOC_SEARCH_CONFIG_HPP
#define BNBLOC_SEARCH_CONFIG_HPP

#include <cstddef>
#include <optional>
#include <string>

#include "bnbloc/geometry.hpp"
#include "bnbloc/point_cloud.hpp"
#include "bnbloc/voxel_map.hpp"

namespace bnbloc {

enum class Strategy { kDfs, kBfs };
enum class BranchMode { kTransOnly, kRotoTrans };

// Procedure names used in timing breakdowns and reports.
inline constexpr const char* kPhaseCreateVoxelMaps = "Create voxel maps";
inline constexpr const char* kPhaseSetSource = "Set source point cloud";
inline constexpr const char* kPhaseInitialNodes = "Initial nodes calculation";
inline constexpr const char* kPhaseFindBestScore = "Find best score";
inline constexpr const char* kPhasePopRemainingQueue = "Pop remaining queue";

struct SearchConfig {
  double min_resolution = 1.0;  ///< finest voxel size r, meters
  int max_level = 6;            ///< tree root level; coarsest voxel is 2^max_level * r

  /// Translational search range; defaults to the map bounding box.
  std::optional<Aabb> translation_range;

  /// Roll and pitch are searched in [-roll_pitch_half_range, +half_range].
  /// Zero disables the tilt search (single index at angle 0).
  double roll_pitch_half_range = 0.02;

  /// Yaw window [yaw_min, yaw_max); the right endpoint is excluded
  /// (periodic sampling, full circle by default).
  double yaw_min = 0.0;
  double yaw_max = kTwoPi;

  double score_threshold_fraction = 0.95;
  std::size_t batch_size = 10000;
  Strategy strategy = Strategy::kBfs;
  BranchMode branch_mode = BranchMode::kRotoTrans;
  int workers = 1;  ///< node-scoring workers used by batch evaluation

  /// Maximum scan range override; computed from the scan when unset.
  std::optional<double> d_max;

  /// When true, the search records every incumbent update in
  /// SearchResult::best_score_trace.
  bool collect_trace = false;
};

/// Counters and per-phase durations for one localization run.
struct Stats {
  std::uint64_t nodes_generated = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t batches_flushed = 0;
  double create_voxel_maps_ms = 0.0;
  double set_source_ms = 0.0;
  double initial_nodes_ms = 0.0;
  double find_best_score_ms = 0.0;
  double pop_remaining_queue_ms = 0.0;

  double preprocessing_total_ms() const { return create_voxel_maps_ms + set_source_ms; }
  double localization_total_ms() const {
    return initial_nodes_ms + find_best_score_ms + pop_remaining_queue_ms;
  }
};

struct SearchResult {
  Pose6 best_pose;
  int best_score = 0;
  int score_threshold = 0;
  std::size_t scan_points = 0;
  bool matched = false;
  Stats stats;
  /// Incumbent scores in update order (only when collect_trace is set).
  std::vector<int> best_score_trace;
};

}  // namespace bnbloc

#endif  // BNBLOC_SEARCH_CONFIG_HPP
