#include "voxgs/varint.hpp"

#include "voxgs/error.hpp"

#include <bit>
#include <cstring>

namespace voxgs {

void
ByteWriter::put_f64(double v)
{
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    buf_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint8_t
ByteReader::get_u8()
{
  if (pos_ >= bytes_.size())
    throw CorruptStream("truncated stream");
  return bytes_[pos_++];
}

std::uint64_t
ByteReader::get_varint()
{
  std::uint64_t v = 0;
  for (int shift = 0;; shift += 7) {
    if (pos_ >= bytes_.size())
      throw CorruptStream("truncated varint");
    const std::uint8_t b = bytes_[pos_++];
    // The tenth byte may only carry the top bit of a 64-bit value.
    if (shift == 63 && (b & 0x7e))
      throw CorruptStream("varint overflow");
    v |= std::uint64_t{b & 0x7fu} << shift;
    if (!(b & 0x80))
      return v;
    if (shift == 63)
      throw CorruptStream("varint overflow");
  }
}

double
ByteReader::get_f64()
{
  if (remaining() < 8)
    throw CorruptStream("truncated stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
  pos_ += 8;
  return std::bit_cast<double>(bits);
}

std::span<const std::uint8_t>
ByteReader::get_bytes(std::size_t n)
{
  if (n > remaining())
    throw CorruptStream("truncated stream");
  auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

}  // namespace voxgs
