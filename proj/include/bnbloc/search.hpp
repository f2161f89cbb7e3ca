#ifndef BNBLOC_SEARCH_HPP
#define BNBLOC_SEARCH_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "bnbloc/angular_grid.hpp"
#include "bnbloc/errors.hpp"
#include "bnbloc/nodes.hpp"
#include "bnbloc/parallel.hpp"
#include "bnbloc/point_cloud.hpp"
#include "bnbloc/search_config.hpp"
#include "bnbloc/voxel_map.hpp"

namespace bnbloc {

/// Scores every node in place against the level map matching its level.
/// Output order equals input order and each node is computed independently,
/// so the result is identical for any worker count.
inline void batch_evaluate(std::vector<Node>& nodes, const MultiResVoxelMap& map,
                           const PointCloud& scan, const AngularGrid& grids,
                           int workers = 1) {
  const double r = map.min_resolution();
  parallel_chunks(nodes.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Node& n = nodes[i];
      const Transform t = pose_to_transform(node_pose(n, grids, r));
      n.score = map.level(n.level).score(t, scan);
    }
  });
}

namespace detail {

struct QueueEntry {
  Node node;
  std::uint64_t seq = 0;
};

// Pop order. BFS pops the best score first (ties: higher level, then
// earlier insertion). DFS pops the deepest node first (ties: best score,
// then latest insertion), which walks each subtree to its leaves before
// touching the next root-level candidate, with children visited best-first.
struct EntryCompare {
  Strategy strategy;
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (strategy == Strategy::kBfs) {
      if (a.node.score != b.node.score) return a.node.score < b.node.score;
      if (a.node.level != b.node.level) return a.node.level < b.node.level;
      return a.seq > b.seq;
    }
    if (a.node.level != b.node.level) return a.node.level > b.node.level;
    if (a.node.score != b.node.score) return a.node.score < b.node.score;
    return a.seq < b.seq;
  }
};

}  // namespace detail

/// Branch-and-bound pose search over the multi-resolution map.
///
/// Root-level nodes are batch-scored and those below the score threshold
/// discarded; the rest seed the queue. The loop pops a node, skips it when
/// its score no longer beats the incumbent, records leaves as the incumbent
/// (ties included, so the last best-scoring leaf wins), and buffers branched
/// children. Whenever the buffer exceeds the batch size (and when the queue
/// drains while the buffer is non-empty) the buffer is batch-evaluated,
/// pruned against the incumbent, and pushed.
inline SearchResult search(const MultiResVoxelMap& map, const PointCloud& scan,
                           const SearchConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto ms_between = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  if (scan.empty()) throw DegenerateScanError("search: empty scan");
  if (map.min_resolution() != cfg.min_resolution)
    throw ConfigError("search: config r does not match the map");
  if (cfg.max_level < 1 || cfg.max_level > map.max_level())
    throw ConfigError("search: max_level must be in [1, map max level]");
  if (cfg.batch_size < 1) throw ConfigError("search: batch_size must be >= 1");
  if (!(cfg.score_threshold_fraction > 0.0 && cfg.score_threshold_fraction <= 1.0))
    throw ConfigError("search: score_threshold_fraction must be in (0, 1]");

  const double d_max = cfg.d_max ? *cfg.d_max : max_range(scan);
  if (!(d_max > 0.0)) throw DegenerateScanError("search: maximum scan range is zero");

  SearchConfig grid_cfg = cfg;  // AngularGrid reads ranges/mode/levels only
  const AngularGrid grids(grid_cfg, d_max);
  const Aabb trans_range = cfg.translation_range ? *cfg.translation_range : map.bbox();

  SearchResult result;
  result.scan_points = scan.size();
  const int threshold = static_cast<int>(
      std::floor(cfg.score_threshold_fraction * static_cast<double>(scan.size())));
  result.score_threshold = threshold;
  int best_score = threshold;
  Node best_node;
  bool matched = false;

  detail::EntryCompare cmp{cfg.strategy};
  std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>,
                      detail::EntryCompare>
      queue(cmp);
  std::uint64_t seq = 0;
  Stats& stats = result.stats;

  const auto t_init_start = Clock::now();
  {
    std::vector<Node> roots = initial_nodes(trans_range, grids, cfg.min_resolution);
    stats.nodes_generated += roots.size();
    batch_evaluate(roots, map, scan, grids, cfg.workers);
    ++stats.batches_flushed;
    for (const Node& n : roots) {
      if (n.score < threshold) {
        ++stats.nodes_pruned;
      } else {
        queue.push({n, seq++});
      }
    }
  }
  const auto t_loop_start = Clock::now();
  stats.initial_nodes_ms = ms_between(t_init_start, t_loop_start);

  std::vector<Node> pending;
  pending.reserve(cfg.batch_size + 64);
  auto t_last_best = t_loop_start;

  const auto flush = [&] {
    batch_evaluate(pending, map, scan, grids, cfg.workers);
    ++stats.batches_flushed;
    for (const Node& n : pending) {
      if (n.score < best_score) {
        ++stats.nodes_pruned;
      } else {
        queue.push({n, seq++});
      }
    }
    pending.clear();
  };

  while (!queue.empty() || !pending.empty()) {
    if (queue.empty()) {
      flush();  // the queue drained with children still buffered
      continue;
    }
    const detail::QueueEntry entry = queue.top();
    queue.pop();
    const Node& node = entry.node;
    if (node.score < best_score) {
      ++stats.nodes_pruned;
      continue;
    }
    if (node.is_leaf()) {
      best_score = node.score;
      best_node = node;
      matched = true;
      t_last_best = Clock::now();
      if (cfg.collect_trace) result.best_score_trace.push_back(best_score);
      continue;
    }
    std::vector<Node> children = branch(node, grids);
    stats.nodes_generated += children.size();
    pending.insert(pending.end(), children.begin(), children.end());
    if (pending.size() > cfg.batch_size) flush();
  }

  const auto t_end = Clock::now();
  if (matched) {
    stats.find_best_score_ms = ms_between(t_loop_start, t_last_best);
    stats.pop_remaining_queue_ms = ms_between(t_last_best, t_end);
  } else {
    stats.find_best_score_ms = ms_between(t_loop_start, t_end);
    stats.pop_remaining_queue_ms = 0.0;
  }

  result.matched = matched;
  result.best_score = best_score;
  if (matched) {
    result.best_pose = node_pose(best_node, grids, cfg.min_resolution).normalized();
  }
  return result;
}

}  // namespace bnbloc

#endif  // BNBLOC_SEARCH_HPP
