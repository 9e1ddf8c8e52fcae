#include "voxgs/container.hpp"

#include "voxgs/attributes.hpp"
#include "voxgs/error.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/rlc.hpp"
#include "voxgs/varint.hpp"

#include <algorithm>
#include <string>

namespace voxgs {

namespace {

  void write_rational(ByteWriter& w, const Rational& r)
  {
    w.put_varint(r.num);
    w.put_varint(r.den);
  }

  Rational read_rational(ByteReader& in, const char* name)
  {
    Rational r{in.get_varint(), in.get_varint()};
    if (!r.positive())
      throw CorruptStream("header quant", std::string(name) + " is not positive");
    return r;
  }

  std::uint32_t read_u32(ByteReader& in, std::uint64_t limit, const char* check)
  {
    const auto v = in.get_varint();
    if (v > limit)
      throw CorruptStream(check, std::to_string(v) + " exceeds " + std::to_string(limit));
    return static_cast<std::uint32_t>(v);
  }

  std::span<const std::uint8_t> section_bytes(
    std::span<const std::uint8_t> bytes, const ContainerHeader& h, Section s)
  {
    const auto& e = h.section(s);
    return bytes.subspan(static_cast<std::size_t>(h.header_bytes + e.offset),
                         static_cast<std::size_t>(e.length));
  }

}  // namespace

std::vector<std::uint8_t>
encode_container(const AnchorCloud& input)
{
  input.quant.check();
  input.layout.check();
  input.bbox.check();
  if (input.layout.k > kMaxContainerK || input.layout.m > kMaxContainerM)
    throw InvalidArgument("attribute layout exceeds container limits");
  if (input.size() > kMaxContainerAnchors)
    throw InvalidArgument("anchor count exceeds container limit of 2^24");
  if (input.size() * input.layout.total_dims() > kMaxContainerValues)
    throw InvalidArgument("attribute count exceeds container limit of 2^28 values");
  const auto report = validate(input);
  if (!report.ok())
    throw InvalidArgument("invalid anchor cloud: " + report.findings.front().message);

  const AnchorCloud cloud = sort_by_morton(input);
  const std::uint32_t depth = cloud.quant.octree_depth();

  std::array<std::vector<std::uint8_t>, kSectionCount> sections;
  {
    const auto octree = octree_encode(cloud.positions, depth);
    std::vector<std::int32_t> occupancy(octree.occupancy.begin(), octree.occupancy.end());
    ByteWriter w;
    rlc_append(w, occupancy);
    sections[0] = std::move(w).take();
  }
  auto attrs = encode_attributes(cloud);
  for (std::size_t g = 0; g < 3; ++g)
    sections[g + 1] = std::move(attrs.groups[g]);

  ByteWriter w;
  w.put_bytes(kContainerMagic);
  w.put_u8(kContainerVersion);
  w.put_varint(cloud.size());
  w.put_varint(cloud.quant.q_p);
  write_rational(w, cloud.quant.q_o);
  write_rational(w, cloud.quant.q_a);
  write_rational(w, cloud.quant.q_s);
  w.put_varint(cloud.layout.k);
  w.put_varint(cloud.layout.m);
  for (double v : cloud.bbox.min)
    w.put_f64(v);
  for (double v : cloud.bbox.max)
    w.put_f64(v);
  w.put_varint(cloud.mlp_blob.size());
  std::uint64_t offset = 0;
  for (const auto& s : sections) {
    w.put_varint(offset);
    w.put_varint(s.size());
    offset += s.size();
  }
  for (const auto& s : sections)
    w.put_bytes(s);
  w.put_bytes(cloud.mlp_blob);
  return std::move(w).take();
}

ContainerHeader
read_container_header(std::span<const std::uint8_t> bytes)
{
  ByteReader in(bytes);
  if (bytes.size() < kContainerMagic.size()
      || !std::equal(kContainerMagic.begin(), kContainerMagic.end(), bytes.begin()))
    throw CorruptStream("bad magic");
  in.get_bytes(kContainerMagic.size());

  ContainerHeader h;
  h.version = in.get_u8();
  if (h.version != kContainerVersion)
    throw CorruptStream(
      "version mismatch", "found " + std::to_string(h.version) + ", expected "
        + std::to_string(kContainerVersion));

  h.anchor_count = in.get_varint();
  if (h.anchor_count > kMaxContainerAnchors)
    throw CorruptStream("count mismatch", "anchor count exceeds 2^24");
  h.quant.q_p = read_u32(in, kMaxGridResolution, "header quant");
  if (h.quant.q_p == 0)
    throw CorruptStream("header quant", "q_p is zero");
  h.quant.q_o = read_rational(in, "q_o");
  h.quant.q_a = read_rational(in, "q_a");
  h.quant.q_s = read_rational(in, "q_s");
  h.layout.k = read_u32(in, kMaxContainerK, "header layout");
  h.layout.m = read_u32(in, kMaxContainerM, "header layout");
  if (h.layout.k == 0 || h.layout.m == 0)
    throw CorruptStream("header layout", "k and m must be positive");
  for (auto& v : h.bbox.min)
    v = in.get_f64();
  for (auto& v : h.bbox.max)
    v = in.get_f64();
  try {
    h.bbox.check();
  } catch (const InvalidArgument& e) {
    throw CorruptStream("header bbox", e.what());
  }

  if (h.anchor_count * h.layout.total_dims() > kMaxContainerValues)
    throw CorruptStream("decoder limit", "more than 2^28 attribute values");
  const std::uint32_t depth = h.quant.octree_depth();
  if (depth < 8 && h.anchor_count > (std::uint64_t{1} << (3 * depth)))
    throw CorruptStream("count mismatch", "more anchors than grid cells");

  h.mlp_blob_len = in.get_varint();
  std::uint64_t expected_offset = 0;
  for (auto& e : h.sections) {
    e.offset = in.get_varint();
    e.length = in.get_varint();
    if (e.offset != expected_offset)
      throw CorruptStream("section bounds", "sections must be contiguous");
    if (e.length > bytes.size())
      throw CorruptStream("section bounds", "section longer than the file");
    expected_offset += e.length;
  }
  h.header_bytes = in.position();

  const std::uint64_t available = in.remaining();
  if (expected_offset > available || h.mlp_blob_len > available - expected_offset)
    throw CorruptStream("section bounds", "sections extend past the end of the file");
  if (expected_offset + h.mlp_blob_len != available)
    throw CorruptStream("section bounds", "trailing bytes after the MLP blob");
  return h;
}

AnchorCloud
decode_container(std::span<const std::uint8_t> bytes)
{
  const auto h = read_container_header(bytes);
  const std::uint32_t depth = h.quant.octree_depth();

  AnchorCloud cloud;
  cloud.layout = h.layout;
  cloud.quant = h.quant;
  cloud.bbox = h.bbox;

  {
    ByteReader in(section_bytes(bytes, h, Section::Geometry));
    // A tree over n leaves has at most n nodes per level.
    const std::uint64_t max_nodes =
      std::min<std::uint64_t>(std::max<std::uint64_t>(h.anchor_count, 1) * depth, kMaxRlcElements);
    const auto symbols = rlc_decode_next(in, max_nodes);
    if (!in.at_end())
      throw CorruptStream("geometry trailing bytes");
    OctreePayload payload;
    payload.depth = depth;
    payload.point_count = h.anchor_count;
    payload.occupancy.reserve(symbols.size());
    for (auto s : symbols) {
      if (s < 0 || s > 255)
        throw CorruptStream("geometry symbol range", "occupancy symbol outside 0..255");
      payload.occupancy.push_back(static_cast<std::uint8_t>(s));
    }
    cloud.positions = octree_decode(payload);
    for (const auto& v : cloud.positions)
      if (v[0] >= h.quant.q_p || v[1] >= h.quant.q_p || v[2] >= h.quant.q_p)
        throw CorruptStream("geometry range", "voxel outside the q_p grid");
  }

  cloud.offsets = decode_group(
    section_bytes(bytes, h, Section::Offsets), h.layout.offset_dims(), h.anchor_count);
  cloud.features = decode_group(
    section_bytes(bytes, h, Section::Features), h.layout.feature_dims(), h.anchor_count);
  cloud.scalings = decode_group(
    section_bytes(bytes, h, Section::Scalings), h.layout.scaling_dims(), h.anchor_count);

  const auto blob = bytes.subspan(bytes.size() - static_cast<std::size_t>(h.mlp_blob_len));
  cloud.mlp_blob.assign(blob.begin(), blob.end());
  return cloud;
}

RateReport
analyze_container(std::span<const std::uint8_t> bytes)
{
  const auto h = read_container_header(bytes);
  const auto cloud = decode_container(bytes);

  RateReport r;
  r.anchor_count = cloud.size();
  r.header_bytes = h.header_bytes;
  r.total_bytes = bytes.size();

  const std::array<std::string, 5> names{"P", "O", "A", "S", "MLP"};
  std::array<std::uint64_t, 5> sizes{};
  for (std::size_t s = 0; s < kSectionCount; ++s)
    sizes[s] = h.sections[s].length;
  sizes[4] = h.mlp_blob_len;
  std::uint64_t payload = 0;
  for (auto s : sizes)
    payload += s;

  std::vector<CalibrationPoint> channels;
  for (std::size_t i = 0; i < 5; ++i) {
    auto& c = r.components[i];
    c.name = names[i];
    c.bytes = sizes[i];
    c.percent = payload ? 100.0 * static_cast<double>(sizes[i]) / static_cast<double>(payload) : 0.0;
  }
  for (std::size_t g = 0; g < 3; ++g) {
    const auto& mat = cloud.group(kAttributeGroups[g]);
    double est = 0.0;
    if (cloud.size() > 0) {
      for (std::size_t c = 0; c < mat.cols(); ++c) {
        const auto point = measure_sample(CalibrationSample{mat.column(c)});
        est += point.estimated_bits;
        channels.push_back(point);
      }
    }
    r.components[g + 1].estimated_bits = est;
  }

  if (!channels.empty()) {
    const auto cal = calibrate_points(channels);
    r.alpha = cal.alpha;
    r.correlation = cal.correlation;
  }
  return r;
}

}  // namespace voxgs
