#ifndef BNBLOC_CLI_APP_HPP
#define BNBLOC_CLI_APP_HPP

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnbloc/benchmark.hpp"
#include "bnbloc/cloud_io.hpp"
#include "bnbloc/errors.hpp"
#include "bnbloc/map_io.hpp"
#include "bnbloc/oracle.hpp"
#include "bnbloc/pipeline.hpp"
#include "bnbloc/scene.hpp"
#include "bnbloc/search.hpp"

namespace bnbloc {

// Exit codes: 0 ok/matched, 2 I/O, 3 no match, 4 degenerate input,
// 5 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNoMatch = 3;
inline constexpr int kExitDegenerate = 4;
inline constexpr int kExitConfig = 5;

/// Flat, serializable form of the search settings plus pipeline knobs.
/// JSON keys mirror the field names; flags override file values and the
/// effective config is echoed into every result.
struct RunConfig {
  double r = 1.0;
  int l_max = 6;
  std::size_t batch_size = 10000;
  double score_threshold_fraction = 0.95;
  std::string strategy = "bfs";      // dfs | bfs
  std::string branch_mode = "roto";  // trans | roto
  int workers = 1;
  double yaw_min = 0.0;
  double yaw_max = kTwoPi;
  double roll_pitch_range = 0.02;
  std::size_t downsample_target = 1000;
  std::uint64_t seed = 0;
  double collision_target = 0.001;
  double mem_cap_mb = 2048.0;
  std::optional<double> d_max;
  std::optional<std::array<double, 6>> trans_range;  // min xyz, max xyz

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("r", c.r);
    get("l_max", c.l_max);
    get("batch_size", c.batch_size);
    get("score_threshold_fraction", c.score_threshold_fraction);
    get("strategy", c.strategy);
    get("branch_mode", c.branch_mode);
    get("workers", c.workers);
    get("yaw_min", c.yaw_min);
    get("yaw_max", c.yaw_max);
    get("roll_pitch_range", c.roll_pitch_range);
    get("downsample_target", c.downsample_target);
    get("seed", c.seed);
    get("collision_target", c.collision_target);
    get("mem_cap_mb", c.mem_cap_mb);
    if (j.contains("d_max") && !j.at("d_max").is_null()) c.d_max = j.at("d_max").get<double>();
    if (j.contains("trans_range") && !j.at("trans_range").is_null())
      c.trans_range = j.at("trans_range").get<std::array<double, 6>>();
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"r", r},
                     {"l_max", l_max},
                     {"batch_size", batch_size},
                     {"score_threshold_fraction", score_threshold_fraction},
                     {"strategy", strategy},
                     {"branch_mode", branch_mode},
                     {"workers", workers},
                     {"yaw_min", yaw_min},
                     {"yaw_max", yaw_max},
                     {"roll_pitch_range", roll_pitch_range},
                     {"downsample_target", downsample_target},
                     {"seed", seed},
                     {"collision_target", collision_target},
                     {"mem_cap_mb", mem_cap_mb},
                     {"d_max", nullptr},
                     {"trans_range", nullptr}};
    if (d_max) j["d_max"] = *d_max;
    if (trans_range) j["trans_range"] = *trans_range;
    return j;
  }

  SearchConfig to_search_config() const {
    SearchConfig s;
    s.min_resolution = r;
    s.max_level = l_max;
    s.batch_size = batch_size;
    s.score_threshold_fraction = score_threshold_fraction;
    if (strategy == "dfs")
      s.strategy = Strategy::kDfs;
    else if (strategy == "bfs")
      s.strategy = Strategy::kBfs;
    else
      throw ConfigError("strategy must be 'dfs' or 'bfs', got '" + strategy + "'");
    if (branch_mode == "trans")
      s.branch_mode = BranchMode::kTransOnly;
    else if (branch_mode == "roto")
      s.branch_mode = BranchMode::kRotoTrans;
    else
      throw ConfigError("branch mode must be 'trans' or 'roto', got '" + branch_mode + "'");
    s.workers = workers;
    s.yaw_min = yaw_min;
    s.yaw_max = yaw_max;
    s.roll_pitch_half_range = roll_pitch_range;
    s.d_max = d_max;
    if (trans_range) {
      const auto& t = *trans_range;
      s.translation_range = Aabb{{t[0], t[1], t[2]}, {t[3], t[4], t[5]}};
    }
    return s;
  }

  std::size_t mem_cap_bytes() const {
    return static_cast<std::size_t>(mem_cap_mb * 1024.0 * 1024.0);
  }
};

namespace cli_detail {

inline nlohmann::json pose_json(const Pose6& p) {
  const Transform t = pose_to_transform(p);
  nlohmann::json matrix = nlohmann::json::array();
  for (int row = 0; row < 3; ++row)
    matrix.push_back({t.rotation[3 * row], t.rotation[3 * row + 1], t.rotation[3 * row + 2],
                      row == 0 ? t.translation.x : (row == 1 ? t.translation.y : t.translation.z)});
  matrix.push_back({0.0, 0.0, 0.0, 1.0});
  return nlohmann::json{{"xyz", {p.x, p.y, p.z}},
                        {"rpy", {p.roll, p.pitch, p.yaw}},
                        {"matrix_4x4", matrix}};
}

inline nlohmann::json stats_json(const Stats& s) {
  return nlohmann::json{{"create_voxel_maps_ms", s.create_voxel_maps_ms},
                        {"set_source_ms", s.set_source_ms},
                        {"initial_nodes_ms", s.initial_nodes_ms},
                        {"find_best_score_ms", s.find_best_score_ms},
                        {"pop_remaining_queue_ms", s.pop_remaining_queue_ms},
                        {"nodes_generated", s.nodes_generated},
                        {"nodes_pruned", s.nodes_pruned},
                        {"batches_flushed", s.batches_flushed}};
}

/// Two-section timing breakdown: preprocessing (performed once per map)
/// separate from the localization pass.
inline void print_breakdown(std::ostream& out, const Stats& s) {
  char buf[160];
  out << "Process        Procedure                      ms\n";
  std::snprintf(buf, sizeof(buf), "Preprocessing  %-26s %10.1f\n", kPhaseCreateVoxelMaps,
                s.create_voxel_maps_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "               %-26s %10.1f\n", kPhaseSetSource,
                s.set_source_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "               %-26s %10.1f\n", "Total",
                s.preprocessing_total_ms());
  out << buf;
  std::snprintf(buf, sizeof(buf), "Localization   %-26s %10.1f\n", kPhaseInitialNodes,
                s.initial_nodes_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "               %-26s %10.1f\n", kPhaseFindBestScore,
                s.find_best_score_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "               %-26s %10.1f\n", kPhasePopRemainingQueue,
                s.pop_remaining_queue_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "               %-26s %10.1f\n", "Total",
                s.localization_total_ms());
  out << buf;
}

/// Loads either a serialized map (rebuild timed) or a raw cloud (voxel map
/// construction timed).
inline MultiResVoxelMap load_or_build_map(const std::string& path, const RunConfig& cfg,
                                          double& create_ms, std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  MultiResVoxelMap map;
  if (is_map_file(path)) {
    map = load_map(path, cfg.collision_target, cfg.mem_cap_bytes());
    if (map.min_resolution() != cfg.r)
      err << "note: using map resolution r=" << map.min_resolution() << " from " << path
          << "\n";
  } else {
    const LoadResult cloud = load_cloud(path);
    if (cloud.dropped_non_finite > 0)
      err << "dropped " << cloud.dropped_non_finite << " non-finite points from " << path
          << "\n";
    map = MultiResVoxelMap::build(cloud.cloud, cfg.r, cfg.l_max, cfg.collision_target,
                                  cfg.mem_cap_bytes());
  }
  create_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return map;
}

inline int map_exception_to_exit(std::ostream& err) {
  try {
    throw;
  } catch (const FileNotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const EmptyCloudError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const DegenerateScanError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InfeasiblePoseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {  // Config, EmptySearchSpace, Capacity, TooLarge
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

struct ConfigCli {
  std::string config_path;
  RunConfig cfg;

  /// Registers the shared flags. Each flag only overrides the config-file
  /// value when actually passed on the command line.
  void add_flags(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flags override it)");
    app->add_option("--r", cfg.r, "finest voxel size in meters");
    app->add_option("--lmax", cfg.l_max, "maximum tree level");
    app->add_option("--batch-size", cfg.batch_size, "pending-buffer flush threshold");
    app->add_option("--threshold", cfg.score_threshold_fraction,
                    "score threshold as a fraction of scan points");
    app->add_option("--strategy", cfg.strategy, "search strategy: dfs | bfs");
    app->add_option("--branch", cfg.branch_mode, "branch components: trans | roto");
    app->add_option("--workers", cfg.workers, "scoring workers (0 = all hardware threads)");
    app->add_option("--seed", cfg.seed, "random seed");
    app->add_option("--downsample-target", cfg.downsample_target,
                    "target scan size for the voxel filter (0 disables)");
    app->add_option("--roll-pitch-range", cfg.roll_pitch_range,
                    "half range of the roll/pitch search in radians");
    app->add_option("--yaw-min", cfg.yaw_min, "yaw window start (radians)");
    app->add_option("--yaw-max", cfg.yaw_max, "yaw window end (radians, exclusive)");
    app->add_option("--d-max", [this](const CLI::results_t& res) {
      cfg.d_max = std::stod(res[0]);
      return true;
    }, "maximum scan range override in meters");
    app->add_option("--collision-target", cfg.collision_target,
                    "hash construction collision-rate target");
    app->add_option("--mem-cap-mb", cfg.mem_cap_mb, "per-level bucket table cap in MiB");
  }

  /// Applies the config file underneath any explicitly passed flags.
  void finalize(CLI::App* app) {
    if (config_path.empty()) return;
    if (!std::filesystem::exists(config_path)) throw FileNotFoundError(config_path);
    std::ifstream in(config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    RunConfig from_file = RunConfig::from_json(j);
    // put back every value the user pinned on the command line
    const auto keep = [&](const char* flag, auto member) {
      if (app->count(flag) > 0) from_file.*member = cfg.*member;
    };
    keep("--r", &RunConfig::r);
    keep("--lmax", &RunConfig::l_max);
    keep("--batch-size", &RunConfig::batch_size);
    keep("--threshold", &RunConfig::score_threshold_fraction);
    keep("--strategy", &RunConfig::strategy);
    keep("--branch", &RunConfig::branch_mode);
    keep("--workers", &RunConfig::workers);
    keep("--seed", &RunConfig::seed);
    keep("--downsample-target", &RunConfig::downsample_target);
    keep("--roll-pitch-range", &RunConfig::roll_pitch_range);
    keep("--yaw-min", &RunConfig::yaw_min);
    keep("--yaw-max", &RunConfig::yaw_max);
    keep("--collision-target", &RunConfig::collision_target);
    keep("--mem-cap-mb", &RunConfig::mem_cap_mb);
    if (app->count("--d-max") > 0) from_file.d_max = cfg.d_max;
    if (cfg.trans_range) from_file.trans_range = cfg.trans_range;
    cfg = from_file;
  }
};

}  // namespace cli_detail

/// Runs one CLI invocation. `args` excludes the program name. All regular
/// output goes to `out`, diagnostics to `err`; the return value is the
/// process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using cli_detail::map_exception_to_exit;

  CLI::App app{"branch-and-bound global localization over sparse voxel maps"};
  app.require_subcommand(1);

  // ---- build-map ----
  auto* build = app.add_subcommand("build-map", "voxelize a map cloud and serialize it");
  std::string build_cloud, build_out;
  cli_detail::ConfigCli build_cfg;
  build->add_option("--cloud", build_cloud, "input point cloud (ply/pcd/xyz)")->required();
  build->add_option("--out", build_out, "output map file")->required();
  build_cfg.add_flags(build);

  // ---- localize ----
  auto* loc = app.add_subcommand("localize", "find the scan pose in a map");
  std::string loc_map, loc_scan, loc_out;
  bool loc_json = false;
  cli_detail::ConfigCli loc_cfg;
  loc->add_option("--map", loc_map, "map file or map point cloud")->required();
  loc->add_option("--scan", loc_scan, "scan point cloud (sensor frame)")->required();
  loc->add_option("--out", loc_out, "also write the result JSON to this path");
  loc->add_flag("--json", loc_json, "emit JSON on stdout (default for localize)");
  loc_cfg.add_flags(loc);

  // ---- oracle ----
  auto* ora = app.add_subcommand("oracle", "exhaustive leaf-grid reference search");
  std::string ora_map, ora_scan;
  cli_detail::ConfigCli ora_cfg;
  ora->add_option("--map", ora_map, "map file or map point cloud")->required();
  ora->add_option("--scan", ora_scan, "scan point cloud (sensor frame)")->required();
  ora_cfg.add_flags(ora);

  // ---- gen-scene ----
  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene with ground truth");
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  SceneSpec gen_spec;
  std::vector<double> gen_size;
  bool gen_no_tilt = false;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "scene seed");
  gen->add_option("--size", gen_size, "map extents: X Y Z")->expected(3);
  gen->add_option("--boxes", gen_spec.num_boxes, "number of buildings");
  gen->add_option("--scan-range", gen_spec.scan_range, "scan range in meters");
  gen->add_option("--map-spacing", gen_spec.map_spacing, "map surface sampling step");
  gen->add_option("--scan-spacing", gen_spec.scan_spacing, "scan surface sampling step");
  gen->add_flag("--no-tilt-noise", gen_no_tilt, "disable roll/pitch ground-truth noise");

  // ---- benchmark ----
  auto* bench = app.add_subcommand("benchmark", "run the configuration matrix on synthetic scenes");
  std::string bench_configs = "adi";
  std::size_t bench_scenes = 5;
  std::string bench_out;
  bool bench_json = false;
  std::vector<double> bench_size;
  SceneSpec bench_spec;
  cli_detail::ConfigCli bench_cfg;
  bench->add_option("--configs", bench_configs, "configuration labels, e.g. adgi");
  bench->add_option("--num-scenes", bench_scenes, "number of scenes");
  bench->add_option("--out", bench_out, "write the JSONL report to this path");
  bench->add_flag("--json", bench_json, "emit the JSONL report on stdout");
  bench->add_option("--size", bench_size, "map extents: X Y Z")->expected(3);
  bench->add_option("--boxes", bench_spec.num_boxes, "number of buildings");
  bench->add_option("--scan-range", bench_spec.scan_range, "scan range in meters");
  bench_cfg.add_flags(bench);

  try {
    std::vector<const char*> argv;
    argv.push_back("bnbloc");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (build->parsed()) {
      build_cfg.finalize(build);
      const RunConfig& cfg = build_cfg.cfg;
      using Clock = std::chrono::steady_clock;
      const auto t0 = Clock::now();
      const LoadResult cloud = load_cloud(build_cloud);
      if (cloud.dropped_non_finite > 0)
        err << "dropped " << cloud.dropped_non_finite << " non-finite points\n";
      const MultiResVoxelMap map = MultiResVoxelMap::build(
          cloud.cloud, cfg.r, cfg.l_max, cfg.collision_target, cfg.mem_cap_bytes());
      save_map(map, build_out);
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      nlohmann::json j{{"map", build_out},
                       {"levels", map.max_level() + 1},
                       {"r", map.min_resolution()},
                       {"create_voxel_maps_ms", ms},
                       {"occupied_per_level", nlohmann::json::array()}};
      for (const auto& lvl : map.levels()) {
        j["occupied_per_level"].push_back(
            {{"level", lvl.level()},
             {"occupied", lvl.occupied_count()},
             {"buckets", lvl.bucket_count()},
             {"collision_rate", lvl.collision_rate()}});
      }
      out << j.dump(2) << "\n";
      err << kPhaseCreateVoxelMaps << ": " << ms << " ms\n";
      return kExitOk;
    }

    if (loc->parsed()) {
      loc_cfg.finalize(loc);
      const RunConfig& cfg = loc_cfg.cfg;
      SearchConfig scfg = cfg.to_search_config();
      scfg.workers = resolve_workers(cfg.workers);

      double create_ms = 0.0;
      const MultiResVoxelMap map = cli_detail::load_or_build_map(loc_map, cfg, create_ms, err);
      SearchConfig effective = scfg;
      effective.min_resolution = map.min_resolution();
      effective.max_level = std::min(scfg.max_level, map.max_level());

      const LoadResult scan = load_cloud(loc_scan);
      SearchResult result =
          localize_scan(map, scan.cloud, effective, cfg.downsample_target);
      result.stats.create_voxel_maps_ms = create_ms;

      nlohmann::json j{{"pose", cli_detail::pose_json(result.best_pose)},
                       {"score", result.best_score},
                       {"score_threshold", result.score_threshold},
                       {"scan_points", result.scan_points},
                       {"matched", result.matched},
                       {"stats", cli_detail::stats_json(result.stats)},
                       {"config", cfg.to_json()}};
      out << j.dump(2) << "\n";
      if (!loc_out.empty()) {
        std::ofstream f(loc_out);
        if (!f) throw IoError("cannot open for write: " + loc_out);
        f << j.dump(2) << "\n";
      }
      cli_detail::print_breakdown(err, result.stats);
      return result.matched ? kExitOk : kExitNoMatch;
    }

    if (ora->parsed()) {
      ora_cfg.finalize(ora);
      const RunConfig& cfg = ora_cfg.cfg;
      SearchConfig scfg = cfg.to_search_config();
      scfg.workers = resolve_workers(cfg.workers);

      double create_ms = 0.0;
      const MultiResVoxelMap map = cli_detail::load_or_build_map(ora_map, cfg, create_ms, err);
      SearchConfig effective = scfg;
      effective.min_resolution = map.min_resolution();
      effective.max_level = std::min(scfg.max_level, map.max_level());

      const LoadResult scan = load_cloud(ora_scan);
      const SourcePrep prep = prepare_source(scan.cloud, cfg.downsample_target);
      const OracleResult res = oracle_search(map, prep.scan, effective);

      nlohmann::json poses = nlohmann::json::array();
      for (std::size_t i = 0; i < res.argmax_poses.size() && i < 32; ++i)
        poses.push_back(cli_detail::pose_json(res.argmax_poses[i]));
      nlohmann::json j{{"best_score", res.best_score},
                       {"leaf_count", res.leaf_count},
                       {"argmax_count", res.argmax_poses.size()},
                       {"argmax_poses", poses},
                       {"scan_points", prep.scan.size()},
                       {"config", cfg.to_json()}};
      out << j.dump(2) << "\n";
      return kExitOk;
    }

    if (gen->parsed()) {
      if (gen_size.size() == 3) {
        gen_spec.size_x = gen_size[0];
        gen_spec.size_y = gen_size[1];
        gen_spec.size_z = gen_size[2];
      }
      gen_spec.tilt_noise = !gen_no_tilt;
      const Scene scene = gen_scene(gen_spec, gen_seed);
      std::filesystem::create_directories(gen_out);
      const auto dir = std::filesystem::path(gen_out);
      save_xyz(scene.map_cloud, (dir / "map.xyz").string());
      save_xyz(scene.scan_cloud, (dir / "scan.xyz").string());
      nlohmann::json j{{"seed", scene.seed},
                       {"gt_pose",
                        {{"x", scene.gt_pose.x},
                         {"y", scene.gt_pose.y},
                         {"z", scene.gt_pose.z},
                         {"roll", scene.gt_pose.roll},
                         {"pitch", scene.gt_pose.pitch},
                         {"yaw", scene.gt_pose.yaw}}},
                       {"map_points", scene.map_cloud.size()},
                       {"scan_points", scene.scan_cloud.size()},
                       {"overlap_fraction", scene_overlap_fraction(scene, gen_spec.feasibility_resolution)}};
      std::ofstream f(dir / "gt.json");
      if (!f) throw IoError("cannot open for write: " + (dir / "gt.json").string());
      f << j.dump(2) << "\n";
      out << j.dump(2) << "\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      bench_cfg.finalize(bench);
      const RunConfig& cfg = bench_cfg.cfg;
      if (bench_size.size() == 3) {
        bench_spec.size_x = bench_size[0];
        bench_spec.size_y = bench_size[1];
        bench_spec.size_z = bench_size[2];
      }
      std::vector<Scene> scenes;
      for (std::size_t i = 0; i < bench_scenes; ++i)
        scenes.push_back(gen_scene(bench_spec, cfg.seed + i));

      SearchConfig base = cfg.to_search_config();
      const BenchmarkReport report = run_benchmark(scenes, bench_configs, base,
                                                   cfg.downsample_target, cfg.collision_target);
      if (!bench_out.empty()) {
        std::ofstream f(bench_out);
        if (!f) throw IoError("cannot open for write: " + bench_out);
        report.write_jsonl(f);
      }
      if (bench_json) report.write_jsonl(out);
      report.write_table(bench_json ? err : out);
      return kExitOk;
    }
  } catch (...) {
    return map_exception_to_exit(err);
  }
  return kExitConfig;
}

}  // namespace bnbloc

#endif  // BNBLOC_CLI_APP_HPP
