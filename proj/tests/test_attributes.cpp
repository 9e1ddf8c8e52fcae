#include "support.hpp"
#include "voxgs/attributes.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/error.hpp"
#include "voxgs/rlc.hpp"
#include "voxgs/varint.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace voxgs;

namespace {

using Bytes = std::vector<std::uint8_t>;

std::string failing_check(const Bytes& bytes)
{
  try {
    rlc_decode(bytes);
  } catch (const CorruptStream& e) {
    return e.check();
  }
  return "none";
}

}  // namespace

TEST_CASE("zigzag mapping")
{
  CHECK(zigzag_encode(0) == 0);
  CHECK(zigzag_encode(-1) == 1);
  CHECK(zigzag_encode(1) == 2);
  CHECK(zigzag_encode(-2) == 3);
  CHECK(zigzag_encode(std::numeric_limits<std::int32_t>::max()) == 0xFFFFFFFEu);
  CHECK(zigzag_encode(std::numeric_limits<std::int32_t>::min()) == 0xFFFFFFFFu);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10000; ++i) {
    const auto v = static_cast<std::int64_t>(rng());
    REQUIRE(zigzag_decode(zigzag_encode(v)) == v);
  }
}

TEST_CASE("varint golden bytes")
{
  auto enc = [](std::uint64_t v) {
    ByteWriter w;
    w.put_varint(v);
    return std::move(w).take();
  };
  CHECK(enc(0) == Bytes{0x00});
  CHECK(enc(127) == Bytes{0x7F});
  CHECK(enc(128) == Bytes{0x80, 0x01});
  CHECK(enc(300) == Bytes{0xAC, 0x02});
  CHECK(enc(UINT64_MAX).size() == 10);
  CHECK(varint_size(UINT64_MAX) == 10);

  std::mt19937_64 rng(32);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t v = rng() >> (rng() % 64);
    const auto b = enc(v);
    REQUIRE(b.size() == varint_size(v));
    REQUIRE(b.size() == test::leb128_size(v));
    ByteReader r(b);
    REQUIRE(r.get_varint() == v);
    REQUIRE(r.at_end());
  }
}

TEST_CASE("varint decoder rejects truncation and overflow")
{
  const Bytes truncated{0x80};
  ByteReader a(truncated);
  CHECK_THROWS_AS(a.get_varint(), CorruptStream);

  const Bytes too_long{0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x01};
  ByteReader b(too_long);
  CHECK_THROWS_AS(b.get_varint(), CorruptStream);

  const Bytes high_bits{0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x02};
  ByteReader c(high_bits);
  CHECK_THROWS_AS(c.get_varint(), CorruptStream);

  const Bytes nothing;
  ByteReader empty(nothing);
  CHECK_THROWS_AS(empty.get_u8(), CorruptStream);
}

TEST_CASE("f64 is little-endian IEEE 754")
{
  ByteWriter w;
  w.put_f64(1.0);
  CHECK(w.bytes() == Bytes{0, 0, 0, 0, 0, 0, 0xF0, 0x3F});
  ByteReader r(w.bytes());
  CHECK(r.get_f64() == 1.0);
}

TEST_CASE("rlc golden bytes")
{
  CHECK(rlc_encode(std::vector<std::int32_t>{5, 5, 5, 2}).serialized == Bytes{0x04, 0x03, 0x0A, 0x01, 0x04});
  CHECK(rlc_encode(std::vector<std::int32_t>{}).serialized == Bytes{0x00});
  CHECK(rlc_encode(std::vector<std::int32_t>{-1}).serialized == Bytes{0x01, 0x01, 0x01});
  CHECK(rlc_encode(std::vector<std::int32_t>(200, 0)).serialized == Bytes{0xC8, 0x01, 0xC8, 0x01, 0x00});

  const auto s = rlc_encode(std::vector<std::int32_t>{5, 5, 5, 2});
  CHECK(s.element_count == 4);
  CHECK(s.tokens == std::vector<RlcToken>{{5, 3}, {2, 1}});
  CHECK(s.bits() == 40);
}

TEST_CASE("rlc round trip, maximal runs and size oracle")
{
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng() % 3000;
    std::vector<std::int32_t> v(n);
    const int mode = trial % 4;
    std::int32_t cur = 0;
    for (auto& x : v) {
      switch (mode) {
        case 0:
          x = test::discrete_laplace(rng, 2.0);
          break;
        case 1:
          if (rng() % 10 == 0)
            cur = test::discrete_laplace(rng, 50.0);
          x = cur;
          break;
        case 2:
          x = static_cast<std::int32_t>(rng());
          break;
        default:
          x = (rng() & 1) ? INT32_MIN : INT32_MAX;
          break;
      }
    }
    const auto s = rlc_encode(v);
    REQUIRE(rlc_decode(s.serialized) == v);
    REQUIRE(s.tokens.size() == test::count_runs(v));
    REQUIRE(s.serialized.size() == test::rlc_size_oracle(v));
    for (std::size_t i = 1; i < s.tokens.size(); ++i)
      REQUIRE(s.tokens[i].value != s.tokens[i - 1].value);
    std::uint64_t total = 0;
    for (const auto& t : s.tokens) {
      REQUIRE(t.run >= 1);
      total += t.run;
    }
    REQUIRE(total == n);
  }
}

TEST_CASE("rlc decoder names the failing check")
{
  CHECK(failing_check({}) == "truncated varint");
  CHECK(failing_check({0x01}) == "truncated varint");
  CHECK(failing_check({0x01, 0x00, 0x00}) == "rlc zero run");
  CHECK(failing_check({0x01, 0x02, 0x00}) == "rlc run overflow");
  CHECK(failing_check({0x01, 0x01, 0x80, 0x80, 0x80, 0x80, 0x20}) == "rlc value range");
  CHECK(failing_check({0x00, 0x00}) == "rlc trailing bytes");
  CHECK(failing_check({0x80, 0x80, 0x80, 0x10}) == "rlc element count");
  CHECK(failing_check({0x01, 0x01, 0x80}) == "truncated varint");

  const Bytes five{0x05};
  ByteReader r(five);
  CHECK_THROWS_AS(rlc_decode_next(r, 4), CorruptStream);
}

TEST_CASE("group payloads are channel-major")
{
  Matrix<std::int32_t> m(3, 2);
  m(0, 0) = 1, m(1, 0) = 1, m(2, 0) = 1;
  m(0, 1) = 0, m(1, 1) = -1, m(2, 1) = -1;
  const auto bytes = encode_group(m);
  CHECK(bytes == Bytes{0x03, 0x03, 0x02, 0x03, 0x01, 0x00, 0x02, 0x01});
  CHECK(decode_group(bytes, 2, 3) == m);
}

TEST_CASE("decode_group rejects inconsistent payloads")
{
  auto check_name = [](const Bytes& b, std::size_t channels, std::uint64_t n) {
    try {
      decode_group(b, channels, n);
    } catch (const CorruptStream& e) {
      return e.check();
    }
    return std::string("none");
  };
  const Bytes one{0x01, 0x01, 0x02};  // one element, value 1
  CHECK(check_name(one, 1, 1) == "none");
  CHECK(check_name(one, 2, 1) == "attribute channel missing");
  CHECK(check_name(one, 1, 2) == "attribute channel length");
  Bytes extra = one;
  extra.push_back(0);
  CHECK(check_name(extra, 1, 1) == "attribute trailing bytes");
  Bytes two = one;
  two.insert(two.end(), {0x02, 0x02, 0x02});
  CHECK(check_name(two, 2, 1) == "attribute channel length");
  CHECK(check_name({0x00, 0x00}, 2, 0) == "none");
  CHECK(check_name({}, 1, kMaxRlcElements + 1) == "attribute channel length");
}

TEST_CASE("attribute round trip on random clouds")
{
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cloud = sort_by_morton(test::random_cloud(rng, rng() % 800, 1 + trial % 8));
    const auto payloads = encode_attributes(cloud);
    const auto back = decode_attributes(payloads, cloud.layout, cloud.size());
    CHECK(back.offsets == cloud.offsets);
    CHECK(back.features == cloud.features);
    CHECK(back.scalings == cloud.scalings);
    CHECK(payloads.bits(AttributeGroup::Scalings) == 8 * payloads[AttributeGroup::Scalings].size());
  }
}

TEST_CASE("encode_attributes requires Morton order")
{
  auto c = AnchorCloud::empty_like(2, {1, 1}, {}, {});
  c.positions = {{1, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(encode_attributes(c), InvalidArgument);
}
