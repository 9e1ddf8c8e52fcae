#include "voxgs/synthetic.hpp"

#include "rng.hpp"
#include "voxgs/error.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace voxgs {

FloatAnchorCloud
generate_synthetic(
  std::uint64_t seed, std::size_t anchors, const AttributeLayout& layout, double run_bias,
  const SyntheticOptions& options)
{
  if (!(run_bias >= 0.0 && run_bias <= 1.0))
    throw InvalidArgument("run_bias must lie in [0, 1]");
  layout.check();
  options.bbox.check();

  detail::Rng rng(seed);
  const auto& box = options.bbox;

  std::vector<std::array<double, 3>> points(anchors);
  std::vector<MortonCode> codes(anchors);
  for (std::size_t i = 0; i < anchors; ++i) {
    Voxel v;
    for (int a = 0; a < 3; ++a) {
      points[i][a] = box.min[a] + rng.uniform() * box.extent(a);
      v[a] = voxel_coordinate(points[i][a], box.min[a], box.extent(a), kMaxGridResolution);
    }
    codes[i] = morton_encode(v);
  }
  std::vector<std::size_t> order(anchors);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return codes[a] < codes[b]; });

  auto cloud = FloatAnchorCloud::empty_like(anchors, layout, box);
  for (std::size_t i = 0; i < anchors; ++i)
    cloud.positions[i] = points[order[i]];

  const double repeat = options.base_repeat + (1.0 - options.base_repeat) * run_bias;
  const double scale = options.laplace_scale * (1.0 - run_bias) * (1.0 - run_bias);

  auto fresh = [&](AttributeGroup g) {
    switch (g) {
      case AttributeGroup::Offsets:
        return rng.bernoulli(options.offset_zero_prob) ? 0.0 : rng.laplace(scale);
      case AttributeGroup::Features:
        return rng.laplace(scale);
      case AttributeGroup::Scalings:
        break;
    }
    return options.scaling_center + rng.laplace(scale / 8.0);
  };

  for (auto g : kAttributeGroups) {
    auto& mat = cloud.group(g);
    for (std::size_t c = 0; c < mat.cols(); ++c) {
      double value = 0.0;
      for (std::size_t i = 0; i < anchors; ++i) {
        if (i == 0 || !rng.bernoulli(repeat))
          value = fresh(g);
        mat(i, c) = value;
      }
    }
  }

  cloud.mlp_blob.resize(options.mlp_bytes);
  for (auto& byte : cloud.mlp_blob)
    byte = static_cast<std::uint8_t>(rng.bits());
  return cloud;
}

std::vector<CorpusScene>
calibration_corpus(std::size_t scenes, std::uint64_t seed)
{
  constexpr double kGolden = 0.6180339887498949;
  constexpr double kSizeStep = 0.3819660112501051;
  std::vector<CorpusScene> out;
  out.reserve(scenes);
  for (std::size_t i = 0; i < scenes; ++i) {
    const double fi = static_cast<double>(i);
    CorpusScene s;
    s.seed = seed * 1000003u + i;
    s.run_bias = scenes > 1 ? 0.9 * fi / static_cast<double>(scenes - 1) : 0.0;
    s.laplace_scale = 0.5 * std::pow(16.0, std::fmod(fi * kGolden, 1.0));
    s.anchors = static_cast<std::size_t>(2000.0 * std::pow(10.0, std::fmod(fi * kSizeStep, 1.0)));
    out.push_back(s);
  }
  return out;
}

CalibrationSample
scene_channels(const CorpusScene& scene, const AttributeLayout& layout, const QuantParams& quant)
{
  SyntheticOptions opts;
  opts.laplace_scale = scene.laplace_scale;
  const auto cloud = sort_by_morton(
    quantize_cloud(generate_synthetic(scene.seed, scene.anchors, layout, scene.run_bias, opts), quant));
  CalibrationSample sample;
  for (auto g : kAttributeGroups) {
    const auto& mat = cloud.group(g);
    for (std::size_t c = 0; c < mat.cols(); ++c)
      sample.push_back(mat.column(c));
  }
  return sample;
}

}  // namespace voxgs
