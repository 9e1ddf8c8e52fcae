#include "voxgs/container.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/quantize.hpp"
#include "voxgs/rate_proxy.hpp"
#include "voxgs/rlc.hpp"
#include "voxgs/sandbox.hpp"
#include "voxgs/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace voxgs;

namespace {

std::vector<std::int32_t> laplace_runs(std::size_t n, double repeat)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> e(0.5);
  std::vector<std::int32_t> v(n);
  std::int32_t cur = 0;
  for (auto& x : v) {
    if (u(rng) >= repeat)
      cur = static_cast<std::int32_t>(std::lround(e(rng) - e(rng)));
    x = cur;
  }
  return v;
}

AnchorCloud scene(std::size_t anchors)
{
  return sort_by_morton(quantize_cloud(generate_synthetic(5, anchors, {10, 50}, 0.5), {}));
}

}  // namespace

static void BM_RlcEncode(benchmark::State& state)
{
  const auto v = laplace_runs(static_cast<std::size_t>(state.range(0)), 0.8);
  for (auto _ : state) {
    ByteWriter w;
    rlc_append(w, v);
    benchmark::DoNotOptimize(w.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RlcEncode)->Arg(1 << 12)->Arg(1 << 20);

static void BM_RlcDecode(benchmark::State& state)
{
  const auto bytes = rlc_encode(laplace_runs(static_cast<std::size_t>(state.range(0)), 0.8)).serialized;
  for (auto _ : state)
    benchmark::DoNotOptimize(rlc_decode(bytes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RlcDecode)->Arg(1 << 12)->Arg(1 << 20);

static void BM_OctreeEncode(benchmark::State& state)
{
  const auto cloud = scene(static_cast<std::size_t>(state.range(0)));
  const auto depth = cloud.quant.octree_depth();
  for (auto _ : state)
    benchmark::DoNotOptimize(octree_encode(cloud.positions, depth));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_OctreeEncode)->Arg(10000)->Arg(100000);

static void BM_OctreeDecode(benchmark::State& state)
{
  const auto cloud = scene(static_cast<std::size_t>(state.range(0)));
  const auto payload = octree_encode(cloud.positions, cloud.quant.octree_depth());
  for (auto _ : state)
    benchmark::DoNotOptimize(octree_decode(payload));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_OctreeDecode)->Arg(10000)->Arg(100000);

static void BM_ContainerEncode(benchmark::State& state)
{
  const auto cloud = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(encode_container(cloud));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_ContainerEncode)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ContainerDecode(benchmark::State& state)
{
  const auto bytes = encode_container(scene(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state)
    benchmark::DoNotOptimize(decode_container(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ContainerDecode)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_EstimateBits(benchmark::State& state)
{
  const auto v = laplace_runs(static_cast<std::size_t>(state.range(0)), 0.0);
  const auto model = fit_laplace(std::span<const std::int32_t>(v));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_bits(model, v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateBits)->Arg(1 << 16);

static void BM_SandboxJointStep(benchmark::State& state)
{
  SandboxConfig c;
  auto s = make_scene(c);
  for (auto _ : state)
    benchmark::DoNotOptimize(step(s, 1e-6, SandboxMode::Joint));
}
BENCHMARK(BM_SandboxJointStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
