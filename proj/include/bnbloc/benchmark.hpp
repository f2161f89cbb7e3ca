#ifndef BNBLOC_BENCHMARK_HPP
#define BNBLOC_BENCHMARK_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bnbloc/errors.hpp"
#include "bnbloc/pipeline.hpp"
#include "bnbloc/scene.hpp"
#include "bnbloc/search.hpp"
#include "bnbloc/search_config.hpp"

namespace bnbloc {

/// Success verdict for one localization attempt against ground truth.
struct EvalOutcome {
  double trans_err = std::numeric_limits<double>::infinity();
  double rot_err = std::numeric_limits<double>::infinity();
  bool success = false;  ///< trans_err < 2.0 m and rot_err < 0.05 rad
  double runtime_ms = 0.0;
  Stats stats;
};

inline constexpr double kSuccessTransErr = 2.0;   // meters
inline constexpr double kSuccessRotErr = 0.05;    // radians

inline EvalOutcome evaluate(const SearchResult& result, const Pose6& gt) {
  EvalOutcome e;
  e.stats = result.stats;
  e.runtime_ms = result.stats.localization_total_ms();
  if (result.matched) {
    e.trans_err = translation_error(result.best_pose, gt);
    e.rot_err = rotation_error(result.best_pose, gt);
  }
  e.success = e.trans_err < kSuccessTransErr && e.rot_err < kSuccessRotErr;
  return e;
}

/// One row of the configuration matrix. Worker count 0 means "all hardware
/// threads"; those rows stand in for the original GPU configurations, which
/// this build maps onto multi-worker batch evaluation.
struct BenchmarkConfig {
  char label = 'a';
  int workers = 1;
  BranchMode branch_mode = BranchMode::kTransOnly;
  Strategy strategy = Strategy::kDfs;
  bool gpu_analogue = false;
};

inline const std::array<BenchmarkConfig, 9>& benchmark_configs() {
  static const std::array<BenchmarkConfig, 9> kConfigs = {{
      {'a', 1, BranchMode::kTransOnly, Strategy::kDfs, false},
      {'b', 4, BranchMode::kTransOnly, Strategy::kDfs, false},
      {'c', 0, BranchMode::kTransOnly, Strategy::kDfs, true},
      {'d', 1, BranchMode::kTransOnly, Strategy::kBfs, false},
      {'e', 4, BranchMode::kTransOnly, Strategy::kBfs, false},
      {'f', 0, BranchMode::kTransOnly, Strategy::kBfs, true},
      {'g', 1, BranchMode::kRotoTrans, Strategy::kBfs, false},
      {'h', 4, BranchMode::kRotoTrans, Strategy::kBfs, false},
      {'i', 0, BranchMode::kRotoTrans, Strategy::kBfs, true},
  }};
  return kConfigs;
}

inline const BenchmarkConfig& benchmark_config(char label) {
  for (const auto& c : benchmark_configs())
    if (c.label == label) return c;
  throw ConfigError(std::string("unknown benchmark configuration '") + label + "'");
}

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::string benchmark_config_description(const BenchmarkConfig& c) {
  std::string s;
  s += (c.workers == 1) ? "single-worker" : (c.workers == 4 ? "4 workers" : "all hardware workers");
  s += c.branch_mode == BranchMode::kTransOnly ? ", trans" : ", trans+rot";
  s += c.strategy == Strategy::kDfs ? ", DFS" : ", BFS";
  if (c.gpu_analogue) s += " (GPU row analogue: multi-worker batch evaluation)";
  return s;
}

struct BenchmarkRow {
  std::size_t scene_index = 0;
  std::uint64_t seed = 0;
  char config = 'a';
  bool matched = false;
  int best_score = 0;
  int score_threshold = 0;
  EvalOutcome outcome;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  nlohmann::json row_json(const BenchmarkRow& r) const {
    const BenchmarkConfig& c = benchmark_config(r.config);
    return nlohmann::json{
        {"scene", r.scene_index},
        {"seed", r.seed},
        {"config",
         {{"label", std::string(1, r.config)},
          {"description", benchmark_config_description(c)},
          {"workers", resolve_workers(c.workers)},
          {"branch_mode", c.branch_mode == BranchMode::kTransOnly ? "trans" : "roto"},
          {"strategy", c.strategy == Strategy::kDfs ? "dfs" : "bfs"},
          {"gpu_analogue", c.gpu_analogue}}},
        {"matched", r.matched},
        {"best_score", r.best_score},
        {"score_threshold", r.score_threshold},
        {"trans_err_m", r.outcome.trans_err},
        {"rot_err_rad", r.outcome.rot_err},
        {"success", r.outcome.success},
        {"runtime_ms", r.outcome.runtime_ms},
        {"stats",
         {{"create_voxel_maps_ms", r.outcome.stats.create_voxel_maps_ms},
          {"set_source_ms", r.outcome.stats.set_source_ms},
          {"initial_nodes_ms", r.outcome.stats.initial_nodes_ms},
          {"find_best_score_ms", r.outcome.stats.find_best_score_ms},
          {"pop_remaining_queue_ms", r.outcome.stats.pop_remaining_queue_ms},
          {"nodes_generated", r.outcome.stats.nodes_generated},
          {"nodes_pruned", r.outcome.stats.nodes_pruned},
          {"batches_flushed", r.outcome.stats.batches_flushed}}}};
  }

  /// One JSON object per line, one line per scene x config.
  void write_jsonl(std::ostream& out) const {
    for (const auto& r : rows) out << row_json(r).dump() << "\n";
  }

  struct ConfigSummary {
    char label;
    std::size_t runs = 0;
    std::size_t successes = 0;
    double median_ms = 0.0;
    double iqr_lo_ms = 0.0;
    double iqr_hi_ms = 0.0;
  };

  std::vector<ConfigSummary> summarize() const {
    std::vector<ConfigSummary> out;
    for (const auto& cfg : benchmark_configs()) {
      std::vector<double> times;
      ConfigSummary s{cfg.label};
      for (const auto& r : rows) {
        if (r.config != cfg.label) continue;
        ++s.runs;
        if (r.outcome.success) ++s.successes;
        times.push_back(r.outcome.runtime_ms);
      }
      if (times.empty()) continue;
      std::sort(times.begin(), times.end());
      const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(times.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < times.size() ? times[i] * (1 - frac) + times[i + 1] * frac
                                    : times[i];
      };
      s.median_ms = quantile(0.5);
      s.iqr_lo_ms = quantile(0.25);
      s.iqr_hi_ms = quantile(0.75);
      out.push_back(s);
    }
    return out;
  }

  void write_table(std::ostream& out) const {
    out << "config  success   median ms   IQR ms              description\n";
    char buf[160];
    for (const auto& s : summarize()) {
      const BenchmarkConfig& c = benchmark_config(s.label);
      std::snprintf(buf, sizeof(buf), "(%c)     %2zu/%-2zu    %9.1f   [%8.1f,%8.1f]   %s\n",
                    s.label, s.successes, s.runs, s.median_ms, s.iqr_lo_ms, s.iqr_hi_ms,
                    benchmark_config_description(c).c_str());
      out << buf;
    }
  }
};

/// Runs every scene against every requested configuration label. The map is
/// built once per scene (timed as map creation); each configuration then
/// localizes the raw scan with its own worker/branch/strategy settings.
inline BenchmarkReport run_benchmark(const std::vector<Scene>& scenes,
                                     const std::string& labels, const SearchConfig& base,
                                     std::size_t downsample_target,
                                     double collision_target = MultiResVoxelMap::kDefaultCollisionTarget) {
  using Clock = std::chrono::steady_clock;
  BenchmarkReport report;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = scenes[si];
    const auto t0 = Clock::now();
    const MultiResVoxelMap map = MultiResVoxelMap::build(
        scene.map_cloud, base.min_resolution, base.max_level, collision_target);
    const double build_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    for (const char label : labels) {
      const BenchmarkConfig& bc = benchmark_config(label);
      SearchConfig cfg = base;
      cfg.branch_mode = bc.branch_mode;
      cfg.strategy = bc.strategy;
      cfg.workers = resolve_workers(bc.workers);

      SearchResult result = localize_scan(map, scene.scan_cloud, cfg, downsample_target);
      result.stats.create_voxel_maps_ms = build_ms;

      BenchmarkRow row;
      row.scene_index = si;
      row.seed = scene.seed;
      row.config = label;
      row.matched = result.matched;
      row.best_score = result.best_score;
      row.score_threshold = result.score_threshold;
      row.outcome = evaluate(result, scene.gt_pose);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace bnbloc

#endif  // BNBLOC_BENCHMARK_HPP
