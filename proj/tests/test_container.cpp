#include "support.hpp"
#include "voxgs/container.hpp"
#include "voxgs/error.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/quantize.hpp"
#include "voxgs/synthetic.hpp"

#include <doctest.h>

#include <random>

using namespace voxgs;

namespace {

using Bytes = std::vector<std::uint8_t>;

AnchorCloud single_anchor()
{
  QuantParams q{2, {1, 1}, {1, 1}, {8, 1}};
  auto c = AnchorCloud::empty_like(1, {1, 1}, q, {});
  c.positions = {{0, 0, 0}};
  return c;
}

std::string check_of(const Bytes& bytes)
{
  try {
    decode_container(bytes);
  } catch (const CorruptStream& e) {
    return e.check();
  }
  return "none";
}

}  // namespace

TEST_CASE("golden container for a single anchor")
{
  const auto bytes = encode_container(single_anchor());
  Bytes expected{'V', 'X', 'G', 'S', 1, 1, 2, 1, 1, 1, 1, 8, 1, 1, 1};
  for (int i = 0; i < 3; ++i)
    expected.insert(expected.end(), 8, 0);  // bbox min 0.0
  for (int i = 0; i < 3; ++i)
    expected.insert(expected.end(), {0, 0, 0, 0, 0, 0, 0xF0, 0x3F});  // bbox max 1.0
  expected.push_back(0);  // no MLP blob
  expected.insert(expected.end(), {0, 3, 3, 9, 12, 3, 15, 18});
  expected.insert(expected.end(), {1, 1, 2});  // occupancy 0x01 as one RLC token
  for (int c = 0; c < 3 + 1 + 6; ++c)
    expected.insert(expected.end(), {1, 1, 0});  // one zero per channel
  CHECK(bytes == expected);

  const auto h = read_container_header(bytes);
  CHECK(h.header_bytes == 72);
  CHECK(h.anchor_count == 1);
  CHECK(h.section(Section::Geometry).length == 3);
  CHECK(h.section(Section::Offsets).length == 9);
  CHECK(h.section(Section::Features).length == 3);
  CHECK(h.section(Section::Scalings).length == 18);
  CHECK(decode_container(bytes) == single_anchor());
}

TEST_CASE("empty cloud round trip")
{
  auto c = AnchorCloud::empty_like(0, {2, 3}, {}, {});
  c.mlp_blob = {1, 2, 3};
  const auto bytes = encode_container(c);
  CHECK(decode_container(bytes) == c);
  const auto r = analyze_container(bytes);
  CHECK(r.anchor_count == 0);
  CHECK_FALSE(r.correlation.has_value());
}

TEST_CASE("random clouds round trip and encode deterministically")
{
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cloud = test::random_cloud(rng, rng() % 1500, 1 + trial % 10);
    const auto bytes = encode_container(cloud);
    const auto back = decode_container(bytes);
    REQUIRE(back == sort_by_morton(cloud));
    REQUIRE(encode_container(back) == bytes);
  }
}

TEST_CASE("encoder rejects invalid clouds")
{
  auto c = single_anchor();
  c.positions[0] = {2, 0, 0};
  CHECK_THROWS_AS(encode_container(c), InvalidArgument);
  c = single_anchor();
  c.positions.push_back({0, 0, 0});
  CHECK_THROWS_AS(encode_container(c), InvalidArgument);
  c = single_anchor();
  c.quant.q_s = {0, 1};
  CHECK_THROWS_AS(encode_container(c), InvalidArgument);
}

TEST_CASE("decoder names the failing check")
{
  const auto good = encode_container(single_anchor());
  CHECK(check_of(good) == "none");

  auto b = good;
  b[0] = 'W';
  CHECK(check_of(b) == "bad magic");
  CHECK(check_of(Bytes{'V', 'X'}) == "bad magic");

  b = good;
  b[4] = 2;
  CHECK(check_of(b) == "version mismatch");

  b = good;
  b[5] = 9;  // nine anchors on a 2^3 grid
  CHECK(check_of(b) == "count mismatch");

  b = good;
  b[6] = 0;
  CHECK(check_of(b) == "header quant");
  b = good;
  b[11] = 0;  // q_s numerator
  CHECK(check_of(b) == "header quant");

  b = good;
  b[13] = 0;  // k
  CHECK(check_of(b) == "header layout");

  b = good;
  b[15 + 24 + 7] = 0xBF;  // max.x = -1.0
  CHECK(check_of(b) == "header bbox");

  b = good;
  b[64] = 1;  // geometry offset must be 0
  CHECK(check_of(b) == "section bounds");

  b = good;
  b.push_back(0);
  CHECK(check_of(b) == "section bounds");
  b = good;
  b.pop_back();
  CHECK(check_of(b) == "section bounds");

  b = good;
  b[72 + 2] = 4;  // occupancy 0x02 puts the point elsewhere: still valid
  CHECK(check_of(b) == "none");
  b[72 + 2] = 0;  // occupancy 0x00
  CHECK(check_of(b) == "octree empty node");
  b = good;
  b[72 + 2] = 6;  // two children for one declared anchor
  CHECK(check_of(b) == "octree point count");
  b = good;
  b[72 + 2] = 1;  // -1 is not an occupancy symbol
  CHECK(check_of(b) == "geometry symbol range");

  b = good;
  b[72 + 3] = 2;  // first offset channel claims two elements
  CHECK(check_of(b) == "attribute channel length");
}

TEST_CASE("decoder rejects voxels outside a non power-of-two grid")
{
  QuantParams q{3, {1, 1}, {1, 1}, {1, 1}};
  auto c = AnchorCloud::empty_like(1, {1, 1}, q, {});
  c.positions = {{2, 2, 2}};
  auto bytes = encode_container(c);
  CHECK(decode_container(bytes) == c);
  // Depth 2; second-level byte holds child 7 of the top node. Move the
  // point to x = 3 by toggling bit 0 -> bit 1 in the leaf occupancy.
  const auto h = read_container_header(bytes);
  auto b = bytes;
  const std::size_t geo = h.header_bytes;
  // RLC stream: count 2, (run 1, zz(0x80)), (run 1, zz(0x01))
  REQUIRE(b[geo] == 2);
  b[b.size() - h.section(Section::Offsets).length - h.section(Section::Features).length
    - h.section(Section::Scalings).length - 1] = 4;  // leaf byte 0x02 -> x = 3
  CHECK(check_of(b) == "geometry range");
}

TEST_CASE("single byte corruption only raises CorruptStream")
{
  std::mt19937_64 rng(52);
  const auto cloud = test::random_cloud(rng, 300, 6);
  const auto bytes = encode_container(cloud);
  for (int i = 0; i < 3000; ++i) {
    auto b = bytes;
    b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      decode_container(b);
    } catch (const CorruptStream&) {
    }
  }
  for (std::size_t cut = 0; cut < bytes.size(); cut += 7)
    CHECK_THROWS_AS(decode_container(std::span(bytes).first(cut)), CorruptStream);
}

TEST_CASE("analyze reports the section split")
{
  const auto scene = calibration_corpus(5, 3)[2];
  SyntheticOptions opts;
  opts.mlp_bytes = 500;
  const auto fcloud = generate_synthetic(scene.seed, 3000, {2, 8}, scene.run_bias, opts);
  const auto cloud = quantize_cloud(fcloud, {});
  const auto bytes = encode_container(cloud);
  const auto h = read_container_header(bytes);
  const auto r = analyze_container(bytes);
  CHECK(r.total_bytes == bytes.size());
  CHECK(r.header_bytes == h.header_bytes);
  std::uint64_t payload = 0;
  double percent = 0.0;
  for (const auto& c : r.components) {
    payload += c.bytes;
    percent += c.percent;
  }
  CHECK(payload + r.header_bytes == bytes.size());
  CHECK(percent == doctest::Approx(100.0));
  CHECK(r.components[4].bytes == 500);
  CHECK_FALSE(r.components[0].estimated_bits.has_value());
  CHECK(r.components[1].estimated_bits.has_value());
  CHECK(r.correlation.has_value());
  CHECK(r.alpha > 0.0);

  const auto text = r.to_text();
  CHECK(text.find("Size (MB)") != std::string::npos);
  const auto kv = r.to_kv();
  CHECK(kv.find("P.bytes=" + std::to_string(r.components[0].bytes) + "\n") != std::string::npos);
  CHECK(kv.find("MLP.percent=") != std::string::npos);
}

TEST_CASE("synthetic pipeline survives a container round trip")
{
  const auto fcloud = generate_synthetic(77, 5000, {3, 10}, 0.4);
  const QuantParams q{512, {4, 1}, {2, 1}, {8, 1}};
  const auto cloud = quantize_cloud(fcloud, q);
  CHECK(cloud.size() <= fcloud.size());
  CHECK(validate(cloud).ok());
  const auto back = decode_container(encode_container(cloud));
  CHECK(back == sort_by_morton(cloud));
}
