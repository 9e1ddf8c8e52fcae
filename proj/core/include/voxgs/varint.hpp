#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

// Little-endian base-128 varints with 0x80 as the continuation bit, and
// zigzag mapping for signed values (0, -1, 1, -2, ... -> 0, 1, 2, 3, ...).

constexpr std::uint64_t zigzag_encode(std::int64_t v)
{
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr std::int64_t zigzag_decode(std::uint64_t u)
{
  return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

constexpr std::size_t varint_size(std::uint64_t v)
{
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

class ByteWriter {
public:
  void put_u8(std::uint8_t v) { buf_.push_back(v); }

  void put_varint(std::uint64_t v)
  {
    while (v >= 0x80) {
      buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    buf_.push_back(static_cast<std::uint8_t>(v));
  }

  void put_svarint(std::int64_t v) { put_varint(zigzag_encode(v)); }

  void put_f64(double v);

  void put_bytes(std::span<const std::uint8_t> bytes)
  {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }

  std::size_t size() const { return buf_.size(); }
  const std::vector<std::uint8_t>& bytes() const& { return buf_; }
  std::vector<std::uint8_t> take() && { return std::move(buf_); }

private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked cursor. Every read past the end throws CorruptStream.
class ByteReader {
public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t get_u8();
  std::uint64_t get_varint();
  std::int64_t get_svarint() { return zigzag_decode(get_varint()); }
  double get_f64();
  std::span<const std::uint8_t> get_bytes(std::size_t n);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace voxgs
