#include "bnbloc/map_io.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "bnbloc/rng.hpp"

namespace bnbloc {
namespace {

namespace fs = std::filesystem;

class MapIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "bnbloc_map_io_test";
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(MapIoTest, SinglePointMapRoundTrip) {
  PointCloud c{{{0.5, 0.5, 0.5}}};
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 2);
  const std::string path = (dir_ / "one.vxm").string();
  save_map(m, path);
  const MultiResVoxelMap loaded = load_map(path);

  EXPECT_EQ(m.max_level(), loaded.max_level());
  EXPECT_DOUBLE_EQ(m.min_resolution(), loaded.min_resolution());
  EXPECT_DOUBLE_EQ(m.bbox().min.x, loaded.bbox().min.x);
  EXPECT_DOUBLE_EQ(m.bbox().max.z, loaded.bbox().max.z);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Point3 p{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
    for (int l = 0; l <= m.max_level(); ++l)
      ASSERT_EQ(m.level(l).lookup(p), loaded.level(l).lookup(p));
  }
}

TEST_F(MapIoTest, RandomMapPreservesOccupiedCounts) {
  Rng rng(5);
  PointCloud c;
  for (int i = 0; i < 4000; ++i)
    c.points.push_back({rng.uniform(-25, 25), rng.uniform(-25, 25), rng.uniform(-4, 8)});
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 0.5, 3, 0.01);
  const std::string path = (dir_ / "rand.vxm").string();
  save_map(m, path);
  const MultiResVoxelMap loaded = load_map(path, 0.01);
  for (int l = 0; l <= 3; ++l) {
    EXPECT_EQ(m.level(l).occupied_count(), loaded.level(l).occupied_count());
    EXPECT_TRUE(m.level(l).occupied_voxels() == loaded.level(l).occupied_voxels());
  }
}

TEST_F(MapIoTest, RepeatedSaveIsByteIdentical) {
  Rng rng(7);
  PointCloud c;
  for (int i = 0; i < 500; ++i)
    c.points.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 3)});
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 2, 0.01);
  const std::string p1 = (dir_ / "a.vxm").string();
  const std::string p2 = (dir_ / "b.vxm").string();
  save_map(m, p1);
  save_map(MultiResVoxelMap::build(c, 1.0, 2, 0.01), p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  EXPECT_EQ(b1, b2);
  EXPECT_FALSE(b1.empty());
}

TEST_F(MapIoTest, CorruptedMagicThrowsFormatError) {
  PointCloud c{{{0.5, 0.5, 0.5}}};
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 2);
  const std::string path = (dir_ / "bad.vxm").string();
  save_map(m, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XX", 2);
  }
  EXPECT_THROW(load_map(path), FormatError);
  EXPECT_FALSE(is_map_file(path));
}

TEST_F(MapIoTest, TruncatedFileThrows) {
  PointCloud c{{{0.5, 0.5, 0.5}, {3.2, 1.1, 0.4}}};
  const MultiResVoxelMap m = MultiResVoxelMap::build(c, 1.0, 2);
  const std::string path = (dir_ / "trunc.vxm").string();
  save_map(m, path);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size / 2);
  EXPECT_THROW(load_map(path), FormatError);
}

TEST_F(MapIoTest, MissingFileThrows) {
  EXPECT_THROW(load_map((dir_ / "missing.vxm").string()), FileNotFoundError);
}

TEST_F(MapIoTest, IsMapFileDetectsMaps) {
  PointCloud c{{{0.5, 0.5, 0.5}}};
  const std::string mp = (dir_ / "m.vxm").string();
  save_map(MultiResVoxelMap::build(c, 1.0, 2), mp);
  EXPECT_TRUE(is_map_file(mp));

  const std::string xyz = (dir_ / "c.xyz").string();
  std::ofstream(xyz) << "1 2 3\n";
  EXPECT_FALSE(is_map_file(xyz));
}

}  // namespace
}  // namespace bnbloc
