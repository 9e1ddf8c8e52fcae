#include "voxgs/attributes.hpp"

#include "voxgs/error.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/rlc.hpp"

#include <string>

namespace voxgs {

std::vector<std::uint8_t>
encode_group(const Matrix<std::int32_t>& values)
{
  ByteWriter w;
  std::vector<std::int32_t> channel;
  for (std::size_t c = 0; c < values.cols(); ++c) {
    channel = values.column(c);
    rlc_append(w, channel);
  }
  return std::move(w).take();
}

Matrix<std::int32_t>
decode_group(std::span<const std::uint8_t> bytes, std::size_t channels, std::uint64_t anchor_count)
{
  if (anchor_count > kMaxRlcElements)
    throw CorruptStream("attribute channel length", "anchor count exceeds decoder limit");
  // Every channel costs at least one byte, three when it holds values.
  if (bytes.size() < channels * (anchor_count ? 3 : 1))
    throw CorruptStream("attribute channel missing", "payload too short for its channels");
  ByteReader in(bytes);
  Matrix<std::int32_t> out(static_cast<std::size_t>(anchor_count), channels);
  for (std::size_t c = 0; c < channels; ++c) {
    if (in.at_end())
      throw CorruptStream(
        "attribute channel missing", "channel " + std::to_string(c) + " of "
          + std::to_string(channels));
    // Peek the element count so a mismatch is reported before allocation.
    ByteReader probe = in;
    if (probe.get_varint() != anchor_count)
      throw CorruptStream(
        "attribute channel length", "channel " + std::to_string(c)
          + " does not hold one value per anchor");
    const auto values = rlc_decode_next(in, anchor_count);
    for (std::size_t r = 0; r < values.size(); ++r)
      out(r, c) = values[r];
  }
  if (!in.at_end())
    throw CorruptStream("attribute trailing bytes");
  return out;
}

AttributePayloads
encode_attributes(const AnchorCloud& cloud)
{
  if (!is_morton_sorted(cloud.positions))
    throw InvalidArgument("encode_attributes: cloud is not in Morton order");
  AttributePayloads out;
  for (auto g : kAttributeGroups)
    out[g] = encode_group(cloud.group(g));
  return out;
}

AttributeMatrices
decode_attributes(
  const AttributePayloads& payloads, const AttributeLayout& layout, std::uint64_t anchor_count)
{
  AttributeMatrices out;
  out.offsets = decode_group(payloads[AttributeGroup::Offsets], layout.offset_dims(), anchor_count);
  out.features = decode_group(payloads[AttributeGroup::Features], layout.feature_dims(), anchor_count);
  out.scalings = decode_group(payloads[AttributeGroup::Scalings], layout.scaling_dims(), anchor_count);
  return out;
}

}  // namespace voxgs
