#pragma once

#include "voxgs/matrix.hpp"
#include "voxgs/model.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

// One byte payload per attribute group (O, A, S). Inside a group the
// channels are stored planar: every anchor's channel 0 as one RLC stream,
// then channel 1, and so on.
struct AttributePayloads {
  std::array<std::vector<std::uint8_t>, 3> groups;

  std::vector<std::uint8_t>& operator[](AttributeGroup g) { return groups[index(g)]; }
  const std::vector<std::uint8_t>& operator[](AttributeGroup g) const { return groups[index(g)]; }

  std::uint64_t bits(AttributeGroup g) const { return 8 * static_cast<std::uint64_t>((*this)[g].size()); }

  static constexpr std::size_t index(AttributeGroup g) { return static_cast<std::size_t>(g); }
};

struct AttributeMatrices {
  Matrix<std::int32_t> offsets;
  Matrix<std::int32_t> features;
  Matrix<std::int32_t> scalings;
};

std::vector<std::uint8_t> encode_group(const Matrix<std::int32_t>& values);

// `anchor_count` rows and `channels` columns are expected; any stream with a
// different element count, a missing channel or leftover bytes is corrupt.
Matrix<std::int32_t> decode_group(
  std::span<const std::uint8_t> bytes, std::size_t channels, std::uint64_t anchor_count);

// Requires the cloud to be in Morton order (InvalidArgument otherwise).
AttributePayloads encode_attributes(const AnchorCloud& cloud);

AttributeMatrices decode_attributes(
  const AttributePayloads& payloads, const AttributeLayout& layout, std::uint64_t anchor_count);

}  // namespace voxgs
