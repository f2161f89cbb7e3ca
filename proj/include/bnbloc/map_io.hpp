#ifndef BNBLOC_MAP_IO_HPP
#define BNBLOC_MAP_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bnbloc/errors.hpp"
#include "bnbloc/voxel_map.hpp"

namespace bnbloc {

// Map file layout (little-endian):
//   magic "3DBBS\x01" (6 bytes), u32 version = 1,
//   f64 min_resolution, u32 max_level, f64 x6 bbox (min xyz, max xyz),
//   then per level: u32 level, u64 count, count x (i32 x, i32 y, i32 z).
// Bucket layout is not serialized; hash tables are rebuilt on load.

inline constexpr char kMapMagic[6] = {'3', 'D', 'B', 'B', 'S', '\x01'};
inline constexpr std::uint32_t kMapVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "map serialization assumes a little-endian host");

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const std::string& path) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError(path + ": truncated map file");
}

}  // namespace detail

inline void save_map(const MultiResVoxelMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out.write(kMapMagic, sizeof(kMapMagic));
  detail::write_pod(out, kMapVersion);
  detail::write_pod(out, map.min_resolution());
  detail::write_pod(out, static_cast<std::uint32_t>(map.max_level()));
  const Aabb& b = map.bbox();
  for (double v : {b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z})
    detail::write_pod(out, v);
  for (int l = 0; l <= map.max_level(); ++l) {
    detail::write_pod(out, static_cast<std::uint32_t>(l));
    const auto voxels = map.level(l).occupied_voxels();
    detail::write_pod(out, static_cast<std::uint64_t>(voxels.size()));
    for (const VoxelCoord& v : voxels) {
      detail::write_pod(out, v.x);
      detail::write_pod(out, v.y);
      detail::write_pod(out, v.z);
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

inline MultiResVoxelMap load_map(const std::string& path,
                                 double collision_target = MultiResVoxelMap::kDefaultCollisionTarget,
                                 std::size_t memory_cap_bytes = LevelMap::kDefaultMemoryCapBytes) {
  if (!std::filesystem::exists(path)) throw FileNotFoundError(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  char magic[6];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMapMagic, sizeof(kMapMagic)) != 0)
    throw FormatError(path + ": bad magic bytes (not a map file)");
  std::uint32_t version = 0;
  detail::read_pod(in, version, path);
  if (version != kMapVersion)
    throw FormatError(path + ": unsupported map version " + std::to_string(version));

  double r = 0.0;
  std::uint32_t max_level = 0;
  detail::read_pod(in, r, path);
  detail::read_pod(in, max_level, path);
  if (!(r > 0.0) || max_level < 1 || max_level > 62)
    throw FormatError(path + ": invalid header values");
  Aabb bbox;
  detail::read_pod(in, bbox.min.x, path);
  detail::read_pod(in, bbox.min.y, path);
  detail::read_pod(in, bbox.min.z, path);
  detail::read_pod(in, bbox.max.x, path);
  detail::read_pod(in, bbox.max.y, path);
  detail::read_pod(in, bbox.max.z, path);

  std::vector<std::vector<VoxelCoord>> per_level(max_level + 1);
  for (std::uint32_t l = 0; l <= max_level; ++l) {
    std::uint32_t stored_level = 0;
    detail::read_pod(in, stored_level, path);
    if (stored_level != l)
      throw FormatError(path + ": level blocks out of order");
    std::uint64_t count = 0;
    detail::read_pod(in, count, path);
    auto& voxels = per_level[l];
    voxels.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      detail::read_pod(in, voxels[i].x, path);
      detail::read_pod(in, voxels[i].y, path);
      detail::read_pod(in, voxels[i].z, path);
    }
  }
  return MultiResVoxelMap::from_levels(std::move(per_level), r, bbox, collision_target,
                                       memory_cap_bytes);
}

/// True when the file starts with the map magic (used by the CLI to accept
/// either a prebuilt map or a raw cloud under one flag).
inline bool is_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[6];
  in.read(magic, sizeof(magic));
  return in && std::memcmp(magic, kMapMagic, sizeof(kMapMagic)) == 0;
}

}  // namespace bnbloc

#endif  // BNBLOC_MAP_IO_HPP
