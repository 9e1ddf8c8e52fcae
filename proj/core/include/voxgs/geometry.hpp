#pragma once

#include "voxgs/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

using MortonCode = std::uint64_t;

// Interleaves x, y, z with x in bit 0, y in bit 1 and z in bit 2 of every
// triple. Components must be below 2^21; otherwise InvalidArgument.
MortonCode morton_encode(const Voxel& v);
Voxel morton_decode(MortonCode code);

// Octree child slot for one level; matches the low triple of morton_encode.
constexpr unsigned child_index(unsigned x, unsigned y, unsigned z)
{
  return (z << 2) | (y << 1) | x;
}

bool is_morton_sorted(std::span<const Voxel> positions);

// Stable permutation of anchors into ascending Morton order. Attribute rows
// travel with their anchors. Duplicate positions throw InvalidArgument.
AnchorCloud sort_by_morton(const AnchorCloud& cloud);

// Breadth-first occupancy serialization: one byte per internal node, bit i
// set when child i is occupied. Leaves are implied by the last level.
struct OctreePayload {
  std::uint32_t depth = 0;
  std::vector<std::uint8_t> occupancy;
  std::uint64_t point_count = 0;
};

OctreePayload octree_encode(std::span<const Voxel> positions, std::uint32_t depth);

// Returns the voxels in Morton order. Throws CorruptStream on truncation,
// empty internal nodes, trailing bytes or a point-count mismatch.
std::vector<Voxel> octree_decode(const OctreePayload& payload);

}  // namespace voxgs
