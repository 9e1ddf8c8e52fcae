#pragma once

#include "voxgs/model.hpp"
#include "voxgs/rate_proxy.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

// Layout of a container, all integers LEB128 unless noted:
//
//   "VXGS" u8:version
//   anchor_count q_p  q_o.num q_o.den  q_a.num q_a.den  q_s.num q_s.den  k m
//   bbox: min.xyz max.xyz as 6 x f64 little-endian
//   mlp_blob_len
//   4 x (offset, length) for geometry, O, A, S; offsets count from the end
//   of the header and sections are laid out back to back in that order
//   sections, then the MLP blob
//
// The geometry section is the octree occupancy byte sequence written as an
// RLC stream; each attribute group is one RLC stream per channel.
inline constexpr std::array<std::uint8_t, 4> kContainerMagic{'V', 'X', 'G', 'S'};
inline constexpr std::uint8_t kContainerVersion = 1;

// Decoder limits; larger declared values are treated as corrupt.
inline constexpr std::uint64_t kMaxContainerAnchors = std::uint64_t{1} << 24;
inline constexpr std::uint32_t kMaxContainerK = 4096;
inline constexpr std::uint32_t kMaxContainerM = 65536;
// anchor_count * (3k + m + 6), i.e. 1 GiB of decoded attributes.
inline constexpr std::uint64_t kMaxContainerValues = std::uint64_t{1} << 28;

enum class Section { Geometry, Offsets, Features, Scalings };
inline constexpr std::size_t kSectionCount = 4;

struct SectionEntry {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  std::uint64_t anchor_count = 0;
  QuantParams quant;
  AttributeLayout layout;
  BoundingBox bbox;
  std::uint64_t mlp_blob_len = 0;
  std::array<SectionEntry, kSectionCount> sections{};
  std::uint64_t header_bytes = 0;  // serialized size, not stored

  const SectionEntry& section(Section s) const { return sections[static_cast<std::size_t>(s)]; }
};

// Sorts into Morton order, then writes header, sections and blob. Output is
// a pure function of the cloud. Invalid clouds throw InvalidArgument.
std::vector<std::uint8_t> encode_container(const AnchorCloud& cloud);

// Parses and checks the header and the section table against the buffer
// size. Throws CorruptStream naming the failing check.
ContainerHeader read_container_header(std::span<const std::uint8_t> bytes);

// Exact inverse of encode_container; the result is in Morton order.
AnchorCloud decode_container(std::span<const std::uint8_t> bytes);

// Bit allocation per section and the Laplace estimate per attribute group
// (one model per channel). alpha and correlation are taken over channels.
RateReport analyze_container(std::span<const std::uint8_t> bytes);

}  // namespace voxgs
