#ifndef BNBLOC_ANGULAR_GRID_HPP
#define BNBLOC_ANGULAR_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/geometry.hpp"
#include "bnbloc/search_config.hpp"

namespace bnbloc {

/// Angular step at voxel size `cell`: the rotation that moves a point at the
/// maximum scan range by exactly one cell, i.e. arccos(1 - cell^2/(2 d^2)).
/// Evaluated through the equivalent chord form 2*asin(cell/(2*d_max)), which
/// stays accurate where the arccos argument approaches 1. Clamped to pi when
/// cell >= 2*d_max.
inline double angular_step(double cell, double d_max) {
  if (!(d_max > 0.0)) throw DegenerateScanError("angular_step: d_max must be > 0");
  if (!(cell > 0.0)) throw ConfigError("angular_step: cell must be > 0");
  const double half_chord = cell / (2.0 * d_max);
  if (half_chord >= 1.0) return 3.141592653589793238462643383279502884;
  return 2.0 * std::asin(half_chord);
}

struct AdjustedStep {
  double step = 0.0;  ///< delta', radians
  int segments = 0;   ///< segments * step == range exactly
};

/// Shrinks `step` so an integer number of segments tiles `range` exactly.
inline AdjustedStep adjusted_step(double range, double step) {
  if (!(range > 0.0)) throw ConfigError("adjusted_step: range must be > 0");
  if (!(step > 0.0)) throw ConfigError("adjusted_step: step must be > 0");
  const int segments = static_cast<int>(std::ceil(range / step));
  return {range / static_cast<double>(segments), segments};
}

/// Index grid of one rotational axis at one level. Valid indices are
/// [0, segments-1] for periodic axes (yaw; the right endpoint duplicates
/// index 0) and [0, segments] for bounded axes (roll/pitch, both endpoints
/// sampled). A zero-width range degenerates to the single index 0 at w_min.
struct AxisGrid {
  double w_min = 0.0;
  double w_max = 0.0;
  double step = 0.0;
  int segments = 0;
  bool periodic = false;

  int max_index() const {
    if (segments == 0) return 0;
    return periodic ? segments - 1 : segments;
  }
  int index_count() const { return max_index() + 1; }
  double angle(int index) const { return w_min + step * static_cast<double>(index); }
};

/// Per-level, per-axis rotational discretization. Axis order: roll, pitch,
/// yaw. In RotoTrans mode the step at level l derives from the voxel size
/// 2^l * r; in TransOnly mode every level reuses the level-0 step, so the
/// initial set already enumerates the finest rotation grid and branching
/// never splits a rotational index.
class AngularGrid {
 public:
  AngularGrid(const SearchConfig& cfg, double d_max) {
    if (!(cfg.yaw_max > cfg.yaw_min))
      throw ConfigError("AngularGrid: yaw range must have positive width");
    if (cfg.roll_pitch_half_range < 0.0)
      throw ConfigError("AngularGrid: roll/pitch range must be >= 0");

    max_level_ = cfg.max_level;
    const double rp = cfg.roll_pitch_half_range;
    const std::array<double, 3> w_min = {-rp, -rp, cfg.yaw_min};
    const std::array<double, 3> w_max = {rp, rp, cfg.yaw_max};
    const std::array<bool, 3> periodic = {false, false, true};

    for (int axis = 0; axis < 3; ++axis) {
      auto& per_level = axes_[static_cast<std::size_t>(axis)];
      per_level.resize(static_cast<std::size_t>(cfg.max_level) + 1);
      for (int l = 0; l <= cfg.max_level; ++l) {
        const int step_level = (cfg.branch_mode == BranchMode::kTransOnly) ? 0 : l;
        const double cell = std::ldexp(cfg.min_resolution, step_level);
        const double delta = angular_step(cell, d_max);
        AxisGrid g;
        g.w_min = w_min[static_cast<std::size_t>(axis)];
        g.w_max = w_max[static_cast<std::size_t>(axis)];
        g.periodic = periodic[static_cast<std::size_t>(axis)];
        const double range = g.w_max - g.w_min;
        if (range > 0.0) {
          const AdjustedStep a = adjusted_step(range, delta);
          g.step = a.step;
          g.segments = a.segments;
        }
        per_level[static_cast<std::size_t>(l)] = g;
      }
    }
  }

  int max_level() const { return max_level_; }

  const AxisGrid& axis(int axis, int level) const {
    return axes_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(level)];
  }

  /// Number of divisions of a rotational index when branching from `level`
  /// to level-1. Exact integer form of ceil(step(level) / step(level-1)):
  /// both steps tile the same range, so the ratio is
  /// segments(level-1) / segments(level).
  int divisions(int axis, int level) const {
    const AxisGrid& parent = axis_at(axis, level);
    const AxisGrid& child = axis_at(axis, level - 1);
    if (child.segments <= 1) return 1;  // child step spans the whole range
    return (child.segments + parent.segments - 1) / parent.segments;
  }

 private:
  const AxisGrid& axis_at(int a, int l) const {
    return axes_[static_cast<std::size_t>(a)][static_cast<std::size_t>(l)];
  }

  std::array<std::vector<AxisGrid>, 3> axes_;
  int max_level_ = 0;
};

}  // namespace bnbloc

#endif  // BNBLOC_ANGULAR_GRID_HPP
