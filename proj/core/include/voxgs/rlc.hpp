#pragma once

#include "voxgs/varint.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

struct RlcToken {
  std::int32_t value = 0;
  std::uint64_t run = 0;

  friend bool operator==(const RlcToken&, const RlcToken&) = default;
};

// Run-length coded sequence in bypass mode (no entropy stage afterwards).
//
// Wire format, bit-exact:
//   varint element_count
//   repeat until element_count is consumed:
//     varint run_length (>= 1)
//     varint zigzag(value)
struct RlcStream {
  std::uint64_t element_count = 0;
  std::vector<RlcToken> tokens;  // maximal runs: neighbours differ in value
  std::vector<std::uint8_t> serialized;

  std::uint64_t bits() const { return 8 * static_cast<std::uint64_t>(serialized.size()); }
};

std::vector<RlcToken> rlc_tokenize(std::span<const std::int32_t> values);

RlcStream rlc_encode(std::span<const std::int32_t> values);

// Appends the serialization of `values` to `out`; returns bytes written.
std::size_t rlc_append(ByteWriter& out, std::span<const std::int32_t> values);

// Decodes one complete stream; trailing bytes are an error.
std::vector<std::int32_t> rlc_decode(std::span<const std::uint8_t> bytes);

// Decodes one stream starting at the reader's cursor. `max_elements` bounds
// the declared element count before anything is allocated.
std::vector<std::int32_t> rlc_decode_next(ByteReader& in, std::uint64_t max_elements);

// Default cap on decoded elements per stream (2^24).
inline constexpr std::uint64_t kMaxRlcElements = std::uint64_t{1} << 24;

}  // namespace voxgs
