#include "voxgs/geometry.hpp"

#include "voxgs/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace voxgs {

namespace {

  // Spreads the low 21 bits of v so that bit i lands on bit 3i.
  constexpr std::uint64_t spread3(std::uint64_t v)
  {
    v &= 0x1fffff;
    v = (v | (v << 32)) & 0x1f00000000ffffull;
    v = (v | (v << 16)) & 0x1f0000ff0000ffull;
    v = (v | (v << 8)) & 0x100f00f00f00f00full;
    v = (v | (v << 4)) & 0x10c30c30c30c30c3ull;
    v = (v | (v << 2)) & 0x1249249249249249ull;
    return v;
  }

  constexpr std::uint32_t compact3(std::uint64_t v)
  {
    v &= 0x1249249249249249ull;
    v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ull;
    v = (v ^ (v >> 4)) & 0x100f00f00f00f00full;
    v = (v ^ (v >> 8)) & 0x1f0000ff0000ffull;
    v = (v ^ (v >> 16)) & 0x1f00000000ffffull;
    v = (v ^ (v >> 32)) & 0x1fffff;
    return static_cast<std::uint32_t>(v);
  }

  constexpr std::uint64_t kMortonMask = (std::uint64_t{1} << 63) - 1;

}  // namespace

MortonCode
morton_encode(const Voxel& v)
{
  if (v[0] >= kMaxGridResolution || v[1] >= kMaxGridResolution || v[2] >= kMaxGridResolution)
    throw InvalidArgument("morton_encode: component exceeds 21 bits");
  return spread3(v[0]) | (spread3(v[1]) << 1) | (spread3(v[2]) << 2);
}

Voxel
morton_decode(MortonCode code)
{
  code &= kMortonMask;
  return {compact3(code), compact3(code >> 1), compact3(code >> 2)};
}

bool
is_morton_sorted(std::span<const Voxel> positions)
{
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(morton_encode(positions[i - 1]) < morton_encode(positions[i])))
      return false;
  return true;
}

AnchorCloud
sort_by_morton(const AnchorCloud& cloud)
{
  const std::size_t n = cloud.size();
  std::vector<MortonCode> codes(n);
  for (std::size_t i = 0; i < n; ++i)
    codes[i] = morton_encode(cloud.positions[i]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return codes[a] < codes[b];
  });
  for (std::size_t i = 1; i < n; ++i)
    if (codes[order[i - 1]] == codes[order[i]])
      throw InvalidArgument(
        "sort_by_morton: duplicate position at anchors " + std::to_string(order[i - 1])
        + " and " + std::to_string(order[i]));

  auto out = AnchorCloud::empty_like(n, cloud.layout, cloud.quant, cloud.bbox);
  out.mlp_blob = cloud.mlp_blob;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    out.positions[i] = cloud.positions[src];
    for (auto g : kAttributeGroups) {
      auto from = cloud.group(g).row(src);
      std::copy(from.begin(), from.end(), out.group(g).row(i).begin());
    }
  }
  return out;
}

OctreePayload
octree_encode(std::span<const Voxel> positions, std::uint32_t depth)
{
  if (depth > kMaxGridBits)
    throw InvalidArgument("octree depth exceeds 21");
  const std::uint64_t limit = std::uint64_t{1} << depth;

  std::vector<MortonCode> codes;
  codes.reserve(positions.size());
  for (const auto& p : positions) {
    if (p[0] >= limit || p[1] >= limit || p[2] >= limit)
      throw InvalidArgument("octree_encode: coordinate exceeds 2^depth");
    codes.push_back(morton_encode(p));
  }
  std::sort(codes.begin(), codes.end());
  if (std::adjacent_find(codes.begin(), codes.end()) != codes.end())
    throw InvalidArgument("octree_encode: duplicate positions");

  OctreePayload payload;
  payload.depth = depth;
  payload.point_count = codes.size();

  // Nodes of one level, visited in ascending prefix order, are exactly the
  // breadth-first order when children are enumerated by child index.
  for (std::uint32_t level = 0; level < depth; ++level) {
    const unsigned node_shift = 3 * (depth - level);
    const unsigned child_shift = node_shift - 3;
    std::size_t i = 0;
    while (i < codes.size()) {
      const MortonCode prefix = codes[i] >> node_shift;
      std::uint8_t mask = 0;
      for (; i < codes.size() && (codes[i] >> node_shift) == prefix; ++i)
        mask |= static_cast<std::uint8_t>(1u << ((codes[i] >> child_shift) & 7));
      payload.occupancy.push_back(mask);
    }
  }
  return payload;
}

std::vector<Voxel>
octree_decode(const OctreePayload& payload)
{
  if (payload.depth > kMaxGridBits)
    throw CorruptStream("octree depth", "depth exceeds 21");

  if (payload.point_count == 0) {
    if (!payload.occupancy.empty())
      throw CorruptStream("octree trailing bytes", "empty octree carries occupancy bytes");
    return {};
  }
  if (payload.depth == 0) {
    if (!payload.occupancy.empty())
      throw CorruptStream("octree trailing bytes");
    if (payload.point_count != 1)
      throw CorruptStream("octree point count", "depth 0 holds exactly one voxel");
    return {Voxel{0, 0, 0}};
  }

  std::vector<MortonCode> nodes{0};
  std::vector<MortonCode> next;
  std::size_t pos = 0;
  for (std::uint32_t level = 0; level < payload.depth; ++level) {
    next.clear();
    for (MortonCode prefix : nodes) {
      if (pos >= payload.occupancy.size())
        throw CorruptStream("octree truncated");
      const std::uint8_t mask = payload.occupancy[pos++];
      if (mask == 0)
        throw CorruptStream("octree empty node", "zero occupancy at an internal node");
      for (unsigned c = 0; c < 8; ++c)
        if (mask & (1u << c))
          next.push_back((prefix << 3) | c);
    }
    if (next.size() > payload.point_count)
      throw CorruptStream("octree point count", "more nodes than declared points");
    nodes.swap(next);
  }
  if (pos != payload.occupancy.size())
    throw CorruptStream("octree trailing bytes");
  if (nodes.size() != payload.point_count)
    throw CorruptStream(
      "octree point count", "decoded " + std::to_string(nodes.size()) + ", declared "
        + std::to_string(payload.point_count));

  std::vector<Voxel> out;
  out.reserve(nodes.size());
  for (MortonCode c : nodes)
    out.push_back(morton_decode(c));
  return out;
}

}  // namespace voxgs
