#include "voxgs/rlc.hpp"

#include "voxgs/error.hpp"

#include <limits>
#include <string>

namespace voxgs {

std::vector<RlcToken>
rlc_tokenize(std::span<const std::int32_t> values)
{
  std::vector<RlcToken> tokens;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] == values[i])
      ++j;
    tokens.push_back({values[i], j - i});
    i = j;
  }
  return tokens;
}

std::size_t
rlc_append(ByteWriter& out, std::span<const std::int32_t> values)
{
  const std::size_t start = out.size();
  out.put_varint(values.size());
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] == values[i])
      ++j;
    out.put_varint(j - i);
    out.put_svarint(values[i]);
    i = j;
  }
  return out.size() - start;
}

RlcStream
rlc_encode(std::span<const std::int32_t> values)
{
  RlcStream s;
  s.element_count = values.size();
  s.tokens = rlc_tokenize(values);
  ByteWriter w;
  rlc_append(w, values);
  s.serialized = std::move(w).take();
  return s;
}

std::vector<std::int32_t>
rlc_decode_next(ByteReader& in, std::uint64_t max_elements)
{
  const std::uint64_t count = in.get_varint();
  if (count > max_elements)
    throw CorruptStream(
      "rlc element count", std::to_string(count) + " exceeds limit "
        + std::to_string(max_elements));

  std::vector<std::int32_t> out;
  // Each token occupies at least two bytes, which bounds the useful reserve.
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, in.remaining() * 64)));
  std::uint64_t filled = 0;
  while (filled < count) {
    const std::uint64_t run = in.get_varint();
    if (run == 0)
      throw CorruptStream("rlc zero run", "run length 0 is forbidden");
    if (run > count - filled)
      throw CorruptStream("rlc run overflow", "run exceeds remaining element count");
    const std::int64_t v = in.get_svarint();
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max())
      throw CorruptStream("rlc value range", "value exceeds 32 bits");
    out.insert(out.end(), static_cast<std::size_t>(run), static_cast<std::int32_t>(v));
    filled += run;
  }
  return out;
}

std::vector<std::int32_t>
rlc_decode(std::span<const std::uint8_t> bytes)
{
  ByteReader in(bytes);
  auto out = rlc_decode_next(in, kMaxRlcElements);
  if (!in.at_end())
    throw CorruptStream("rlc trailing bytes");
  return out;
}

}  // namespace voxgs
