#include "voxgs/quantize.hpp"

#include "voxgs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace voxgs {

std::int64_t
ste_round(double x)
{
  if (!std::isfinite(x))
    throw InvalidArgument("ste_round: non-finite input");
  constexpr double kLimit = 4611686018427387904.0;  // 2^62
  if (std::fabs(x) >= kLimit)
    throw InvalidArgument("ste_round: magnitude out of range");
  // std::round rounds halfway cases away from zero.
  return static_cast<std::int64_t>(std::round(x));
}

SteGrad
ste_round_with_grad(double x)
{
  return {ste_round(x), true};
}

std::uint32_t
voxel_coordinate(double x, double lo, double extent, std::uint32_t q_p)
{
  if (extent <= 0.0)
    return 0;
  const double scaled = std::round((x - lo) / extent * static_cast<double>(q_p));
  if (scaled <= 0.0)
    return 0;
  const double top = static_cast<double>(q_p - 1);
  return static_cast<std::uint32_t>(std::min(scaled, top));
}

double
voxel_center(std::uint32_t g, double lo, double extent, std::uint32_t q_p)
{
  return lo + static_cast<double>(g) * extent / static_cast<double>(q_p);
}

namespace {

  std::uint64_t pack(const Voxel& v)
  {
    return std::uint64_t{v[0]} | (std::uint64_t{v[1]} << 21) | (std::uint64_t{v[2]} << 42);
  }

}  // namespace

PositionQuantization
quantize_positions(
  std::span<const std::array<double, 3>> points, std::uint32_t q_p,
  const BoundingBox& bbox)
{
  if (q_p == 0)
    throw InvalidArgument("quant scale must be positive (q_p)");
  if (q_p > kMaxGridResolution)
    throw InvalidArgument("q_p exceeds 2^21, Morton codes would overflow");
  bbox.check();

  PositionQuantization out;
  out.voxel_of.resize(points.size());
  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(points.size());

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!bbox.contains(p))
      throw InvalidArgument("point " + std::to_string(i) + " lies outside the bounding box");
    Voxel v;
    for (int a = 0; a < 3; ++a)
      v[a] = voxel_coordinate(p[a], bbox.min[a], bbox.extent(a), q_p);

    auto [it, inserted] = index.emplace(pack(v), out.voxels.size());
    if (inserted) {
      out.voxels.push_back(v);
      out.source.push_back(i);
    }
    out.voxel_of[i] = it->second;
  }
  return out;
}

Matrix<std::int32_t>
quantize_features(const Matrix<double>& f, const Rational& q)
{
  if (!q.positive())
    throw InvalidArgument("quant scale must be positive");
  const double scale = q.value();
  Matrix<std::int32_t> out(f.rows(), f.cols());
  auto src = f.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i]))
      throw InvalidArgument("quantize_features: non-finite entry at " + std::to_string(i));
    const auto r = ste_round(src[i] * scale);
    if (r < std::numeric_limits<std::int32_t>::min() || r > std::numeric_limits<std::int32_t>::max())
      throw InvalidArgument("quantize_features: value exceeds 32-bit range");
    dst[i] = static_cast<std::int32_t>(r);
  }
  return out;
}

double
dequantize_value(std::int32_t v, const Rational& q)
{
  return static_cast<double>(v) * static_cast<double>(q.den) / static_cast<double>(q.num);
}

Matrix<double>
dequantize_features(const Matrix<std::int32_t>& fq, const Rational& q)
{
  if (!q.positive())
    throw InvalidArgument("quant scale must be positive");
  Matrix<double> out(fq.rows(), fq.cols());
  auto src = fq.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = dequantize_value(src[i], q);
  return out;
}

AnchorCloud
quantize_cloud(const FloatAnchorCloud& cloud, const QuantParams& quant)
{
  quant.check();
  cloud.layout.check();
  for (auto g : kAttributeGroups) {
    const auto& mat = cloud.group(g);
    const std::size_t want = g == AttributeGroup::Offsets ? cloud.layout.offset_dims()
      : g == AttributeGroup::Features                     ? cloud.layout.feature_dims()
                                                          : cloud.layout.scaling_dims();
    if (mat.rows() != cloud.size() || mat.cols() != want)
      throw InvalidArgument("attribute group " + std::string(group_name(g)) + " has wrong shape");
  }

  const auto pq = quantize_positions(cloud.positions, quant.q_p, cloud.bbox);
  auto out = AnchorCloud::empty_like(pq.voxels.size(), cloud.layout, quant, cloud.bbox);
  out.positions = pq.voxels;
  out.mlp_blob = cloud.mlp_blob;

  for (auto g : kAttributeGroups) {
    const auto& src = cloud.group(g);
    const auto all = quantize_features(src, out.scale(g));
    auto& dst = out.group(g);
    for (std::size_t i = 0; i < pq.source.size(); ++i)
      std::copy_n(all.row(pq.source[i]).begin(), dst.cols(), dst.row(i).begin());
  }
  return out;
}

FloatAnchorCloud
dequantize_cloud(const AnchorCloud& cloud)
{
  auto out = FloatAnchorCloud::empty_like(cloud.size(), cloud.layout, cloud.bbox);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (int a = 0; a < 3; ++a)
      out.positions[i][a] = voxel_center(
        cloud.positions[i][a], cloud.bbox.min[a], cloud.bbox.extent(a), cloud.quant.q_p);
  for (auto g : kAttributeGroups)
    out.group(g) = dequantize_features(cloud.group(g), cloud.scale(g));
  out.mlp_blob = cloud.mlp_blob;
  return out;
}

}  // namespace voxgs
