#include "bnbloc/voxel_map.hpp"

#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "bnbloc/rng.hpp"

namespace bnbloc {
namespace {

using Key = std::tuple<int, int, int>;

Key key(const VoxelCoord& v) { return {v.x, v.y, v.z}; }

// Reference implementation with exact set semantics: voxelize, inflate with
// v - j, j in {0,1}^3, membership via std::set.
std::set<Key> reference_inflated_set(const PointCloud& pts, double cell) {
  std::set<Key> sources;
  for (const Point3& p : pts.points)
    sources.insert({static_cast<int>(std::floor(p.x / cell)),
                    static_cast<int>(std::floor(p.y / cell)),
                    static_cast<int>(std::floor(p.z / cell))});
  std::set<Key> out;
  for (const auto& [x, y, z] : sources)
    for (int jx = 0; jx <= 1; ++jx)
      for (int jy = 0; jy <= 1; ++jy)
        for (int jz = 0; jz <= 1; ++jz) out.insert({x - jx, y - jy, z - jz});
  return out;
}

PointCloud random_cloud(Rng& rng, std::size_t n, double lo, double hi) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)});
  return c;
}

TEST(SpatialHash, ZeroVectorIsZero) {
  EXPECT_EQ(0u, spatial_hash({0, 0, 0}, 1));
  EXPECT_EQ(0u, spatial_hash({0, 0, 0}, 97));
  EXPECT_EQ(0u, spatial_hash({0, 0, 0}, 1 << 20));
}

TEST(SpatialHash, UnitXModSmallPrime) {
  // 73856093 = 97 * 761403 + 2
  EXPECT_EQ(2u, spatial_hash({1, 0, 0}, 97));
}

TEST(SpatialHash, NegativeCoordinatesWrap) {
  // two's-complement wrap: hash(-1,0,0) = (2^64 - 73856093) mod T
  const std::uint64_t expected = (0ULL - 73856093ULL) % 1024ULL;
  EXPECT_EQ(expected, spatial_hash({-1, 0, 0}, 1024));
}

TEST(SpatialHash, BirthdayRegimeCollisionRate) {
  Rng rng(17);
  const std::uint64_t buckets = 200000;
  std::set<std::uint64_t> seen;
  std::set<Key> coords;
  std::size_t collisions = 0, inserted = 0;
  while (inserted < 100000) {
    const VoxelCoord v{static_cast<int>(rng.uniform_int(-4000, 4000)),
                       static_cast<int>(rng.uniform_int(-4000, 4000)),
                       static_cast<int>(rng.uniform_int(-200, 200))};
    if (!coords.insert(key(v)).second) continue;
    ++inserted;
    if (!seen.insert(spatial_hash(v, buckets)).second) ++collisions;
  }
  const double rate = static_cast<double>(collisions) / static_cast<double>(inserted);
  RecordProperty("collision_rate", std::to_string(rate));
  EXPECT_LT(rate, 0.40) << "unexpectedly poor hash distribution";
}

TEST(BuildLevel, SinglePointInflatesToEightVoxels) {
  PointCloud c{{{0.5, 0.5, 0.5}}};
  const LevelMap m = build_level(c, 0, 1.0, 0.001);
  EXPECT_EQ(8u, m.occupied_count());
  for (int x = -1; x <= 0; ++x)
    for (int y = -1; y <= 0; ++y)
      for (int z = -1; z <= 0; ++z) EXPECT_TRUE(m.contains({x, y, z}));
  EXPECT_FALSE(m.contains({1, 0, 0}));
  EXPECT_FALSE(m.contains({-2, 0, 0}));
}

TEST(BuildLevel, DuplicatePointsHaveSetSemantics) {
  PointCloud one{{{0.5, 0.5, 0.5}}};
  PointCloud two{{{0.5, 0.5, 0.5}, {0.4, 0.6, 0.5}}};
  const LevelMap a = build_level(one, 0, 1.0, 0.001);
  const LevelMap b = build_level(two, 0, 1.0, 0.001);
  EXPECT_EQ(a.occupied_count(), b.occupied_count());
  EXPECT_TRUE(a.occupied_voxels() == b.occupied_voxels());
}

TEST(BuildLevel, CollisionRateMeetsTargetAndLoadBelowOne) {
  Rng rng(23);
  PointCloud c = random_cloud(rng, 2000, -15, 15);
  const LevelMap m = build_level(c, 0, 1.0, 0.001);
  EXPECT_LE(m.collision_rate(), 0.001);
  EXPECT_LT(m.load_factor(), 1.0);
  // sparsity: at most 8 inflated entries per distinct source voxel
  std::set<Key> sources;
  for (const Point3& p : c.points)
    sources.insert({static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y)),
                    static_cast<int>(std::floor(p.z))});
  EXPECT_LE(m.occupied_count(), 8 * sources.size());
}

TEST(BuildLevel, MemoryCapThrows) {
  Rng rng(29);
  PointCloud c = random_cloud(rng, 5000, -50, 50);
  EXPECT_THROW(build_level(c, 0, 1.0, 0.001, /*memory_cap_bytes=*/4096),
               CapacityExceededError);
}

TEST(LevelMap, LookupMatchesReferenceSetOn100kProbes) {
  Rng rng(31);
  PointCloud c = random_cloud(rng, 10000, -30, 30);
  const double cell = 1.0;
  const LevelMap m = build_level(c, 0, cell, 0.01);
  const std::set<Key> ref = reference_inflated_set(c, cell);
  ASSERT_EQ(ref.size(), m.occupied_count());

  std::size_t checked_hits = 0, checked_misses = 0;
  for (int i = 0; i < 100000; ++i) {
    // half the probes near the cloud (mostly hits), half far away
    const bool near = (i % 2) == 0;
    const double span = near ? 31.0 : 500.0;
    const Point3 p{rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-span, span)};
    const VoxelCoord v = voxel_of(p, cell);
    const bool expected = ref.count(key(v)) > 0;
    ASSERT_EQ(expected ? 1 : 0, m.lookup(p)) << "probe (" << p.x << "," << p.y << "," << p.z << ")";
    (expected ? checked_hits : checked_misses)++;
  }
  EXPECT_GT(checked_hits, 1000u);
  EXPECT_GT(checked_misses, 1000u);
}

TEST(LevelMap, RebuildIsIdentical) {
  Rng rng(37);
  PointCloud c = random_cloud(rng, 3000, -20, 20);
  const LevelMap a = build_level(c, 1, 0.5, 0.01);
  const LevelMap b = build_level(c, 1, 0.5, 0.01);
  EXPECT_TRUE(a.occupied_voxels() == b.occupied_voxels());
  EXPECT_EQ(a.bucket_count(), b.bucket_count());
}

TEST(LevelMap, ScoreMatchesPerPointLoop) {
  Rng rng(41);
  PointCloud map_pts = random_cloud(rng, 5000, 0, 30);
  const LevelMap m = build_level(map_pts, 0, 1.0, 0.01);

  PointCloud scan = random_cloud(rng, 400, -5, 35);
  const Transform t = pose_to_transform(Pose6{1.5, -2.0, 0.5, 0.01, -0.02, 0.9});
  int expected = 0;
  for (const Point3& p : scan.points) expected += m.lookup(transform_point(t, p));
  EXPECT_EQ(expected, m.score(t, scan));
}

TEST(LevelMap, ScoreSaturatesAndZeroes) {
  PointCloud map_pts;
  for (int i = 0; i < 10; ++i) map_pts.points.push_back({i * 0.1, 0.05, 0.05});
  const LevelMap m = build_level(map_pts, 0, 1.0, 0.001);

  PointCloud scan;
  for (int i = 0; i < 10; ++i) scan.points.push_back({i * 0.05, 0.5, 0.5});
  EXPECT_EQ(10, m.score(Transform{}, scan));  // all in occupied voxel (0,0,0)

  Transform far;
  far.translation = {1000, 1000, 1000};
  EXPECT_EQ(0, m.score(far, scan));
}

TEST(MultiRes, ResolutionsDouble) {
  PointCloud c{{{0.5, 0.5, 0.5}, {3.5, 2.5, 1.5}}};
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 2);
  ASSERT_EQ(3u, m.levels().size());
  EXPECT_DOUBLE_EQ(1.0, m.level(0).resolution());
  EXPECT_DOUBLE_EQ(2.0, m.level(1).resolution());
  EXPECT_DOUBLE_EQ(4.0, m.level(2).resolution());
}

TEST(MultiRes, PaperDefaultsGiveSevenLevels) {
  PointCloud c{{{0.5, 0.5, 0.5}, {10, 20, 5}}};
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 6);
  EXPECT_EQ(7u, m.levels().size());
  EXPECT_DOUBLE_EQ(1.0, m.level(0).resolution());
  EXPECT_DOUBLE_EQ(64.0, m.level(6).resolution());
}

TEST(MultiRes, HierarchicalCoverInvariant) {
  Rng rng(43);
  PointCloud c = random_cloud(rng, 2000, -15, 15);
  const double r = 0.7;
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, r, 4, 0.01);

  // every occupied leaf voxel's center is occupied at every coarser level
  const auto leaves = m.level(0).occupied_voxels();
  for (const VoxelCoord& v : leaves) {
    const Point3 center{r * (v.x + 0.5), r * (v.y + 0.5), r * (v.z + 0.5)};
    for (int l = 0; l <= m.max_level(); ++l)
      ASSERT_EQ(1, m.level(l).lookup(center))
          << "leaf (" << v.x << "," << v.y << "," << v.z << ") uncovered at level " << l;
  }
}

TEST(MultiRes, TranslationalBoundAdmissibility) {
  // With rotation fixed, a node's score at level l bounds each of its eight
  // translational children at level l-1. Sampled over random scenes/nodes.
  Rng rng(47);
  for (int scene = 0; scene < 3; ++scene) {
    PointCloud map_pts = random_cloud(rng, 4000, 0, 24);
    const double r = 1.0;
    const MultiResVoxelMap m = MultiResVoxelMap::build(map_pts, r, 3, 0.01);
    PointCloud scan = random_cloud(rng, 150, -8, 8);
    const Transform rot = pose_to_transform(
        Pose6{0, 0, 0, rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(0, kTwoPi)});

    std::size_t violations = 0, pairs = 0;
    for (int trial = 0; trial < 400; ++trial) {
      const int level = static_cast<int>(rng.uniform_int(1, 3));
      const double cell = std::ldexp(r, level);
      const int ix = static_cast<int>(rng.uniform_int(-2, static_cast<int>(24 / cell) + 1));
      const int iy = static_cast<int>(rng.uniform_int(-2, static_cast<int>(24 / cell) + 1));
      const int iz = static_cast<int>(rng.uniform_int(-2, static_cast<int>(24 / cell) + 1));

      Transform parent = rot;
      parent.translation = {cell * ix, cell * iy, cell * iz};
      const int parent_score = m.level(level).score(parent, scan);
      const double child_cell = std::ldexp(r, level - 1);
      for (int jx = 0; jx <= 1; ++jx)
        for (int jy = 0; jy <= 1; ++jy)
          for (int jz = 0; jz <= 1; ++jz) {
            Transform child = rot;
            child.translation = {child_cell * (2 * ix + jx), child_cell * (2 * iy + jy),
                                 child_cell * (2 * iz + jz)};
            const int child_score = m.level(level - 1).score(child, scan);
            ++pairs;
            if (parent_score < child_score) ++violations;
          }
    }
    EXPECT_EQ(0u, violations) << "of " << pairs << " pairs in scene " << scene;
  }
}

TEST(MultiRes, BuildValidation) {
  EXPECT_THROW(MultiResVoxelMap::build(PointCloud{}, 1.0, 3), EmptyCloudError);
  PointCloud c{{{0, 0, 0}}};
  EXPECT_THROW(MultiResVoxelMap::build(c, 1.0, 0), ConfigError);
  EXPECT_THROW(MultiResVoxelMap::build(c, -1.0, 3), ConfigError);
}

}  // namespace
}  // namespace bnbloc
