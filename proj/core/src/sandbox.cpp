#include "voxgs/sandbox.hpp"

#include "rng.hpp"
#include "voxgs/error.hpp"
#include "voxgs/quantize.hpp"
#include "voxgs/rate_proxy.hpp"
#include "voxgs/rlc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace voxgs {

namespace {

  constexpr double kOffsetZeroProb = 0.6;
  constexpr double kOffsetScale = 0.5;
  constexpr double kFeatureStd = 0.6;
  constexpr double kFeatureShared = 0.3;  // share of feature variance common to an anchor
  constexpr double kScalingCenter = -2.0;
  constexpr double kScalingStd = 0.15;

  double sign(double v) { return static_cast<double>((v > 0) - (v < 0)); }

}  // namespace

void
SandboxConfig::check() const
{
  if (anchors == 0)
    throw InvalidArgument("sandbox needs at least one anchor");
  layout.check();
  quant.check();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InvalidArgument("learning rate must be positive");
  for (double w : {weights.l1, weights.l2, weights.rate})
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("loss weights must be finite and non-negative");
  if (warmup >= steps)
    throw InvalidArgument(
      "warmup (" + std::to_string(warmup) + ") must be below steps (" + std::to_string(steps) + ")");
  if (trace_interval == 0)
    throw InvalidArgument("trace interval must be positive");
  if (!(init_noise >= 0.0) || !(visibility_spread >= 0.0))
    throw InvalidArgument("noise and visibility spread must be non-negative");
}

std::size_t
SandboxScene::elements() const
{
  return params[0].size() + params[1].size() + params[2].size();
}

double
SandboxScene::scale(std::size_t group) const
{
  switch (group) {
    case 0:
      return quant.q_o.value();
    case 1:
      return quant.q_a.value();
    default:
      return quant.q_s.value();
  }
}

SandboxScene
make_scene(const SandboxConfig& config)
{
  config.check();
  detail::Rng rng(config.seed);
  const std::size_t n = config.anchors;

  SandboxScene scene;
  scene.quant = config.quant;
  scene.weights = config.weights;
  scene.detach_fit = config.detach_fit;

  auto& o = scene.target[0] = Matrix<double>(n, config.layout.offset_dims());
  auto& a = scene.target[1] = Matrix<double>(n, config.layout.feature_dims());
  auto& s = scene.target[2] = Matrix<double>(n, config.layout.scaling_dims());

  for (auto& v : o.data())
    v = rng.bernoulli(kOffsetZeroProb) ? 0.0 : rng.laplace(kOffsetScale);
  const double shared = std::sqrt(kFeatureShared);
  const double own = std::sqrt(1.0 - kFeatureShared);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    for (auto& v : a.row(i))
      v = kFeatureStd * (shared * z + own * rng.normal());
  }
  for (auto& v : s.data())
    v = kScalingCenter + kScalingStd * rng.normal();

  scene.visibility.resize(n);
  double sum = 0.0;
  for (auto& w : scene.visibility) {
    w = std::pow(1.0 - rng.uniform(), config.visibility_spread);
    sum += w;
  }
  for (auto& w : scene.visibility)
    w *= static_cast<double>(n) / sum;

  for (std::size_t g = 0; g < 3; ++g) {
    const auto t = scene.target[g].data();
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    scene.ranges[g] = *hi > *lo ? *hi - *lo : 1.0;
    scene.params[g] = scene.target[g];
    for (auto& v : scene.params[g].data())
      v += config.init_noise * rng.normal();
  }
  return scene;
}

LossBreakdown
evaluate(const SandboxScene& scene, SandboxMode mode, std::array<Matrix<double>, 3>* grad)
{
  const auto& w = scene.weights;
  const double e_total = static_cast<double>(scene.elements());
  const double n = static_cast<double>(scene.anchors());
  LossBreakdown out;

  // Symbol values fed to the rate term: scaled params, rounded in joint
  // mode. `rounded` always holds the coded integers for reporting.
  std::array<Matrix<double>, 3> symbols;
  std::array<Matrix<double>, 3> rounded;

  for (std::size_t g = 0; g < 3; ++g) {
    const auto& p = scene.params[g];
    const auto& t = scene.target[g];
    const double q = scene.scale(g);
    const double r = scene.ranges[g];
    symbols[g] = Matrix<double>(p.rows(), p.cols());
    rounded[g] = Matrix<double>(p.rows(), p.cols());
    if (grad)
      (*grad)[g] = Matrix<double>(p.rows(), p.cols());

    for (std::size_t i = 0; i < p.rows(); ++i) {
      const double omega = scene.visibility[i];
      for (std::size_t c = 0; c < p.cols(); ++c) {
        const double x = p(i, c) * q;
        if (!std::isfinite(x))
          throw Error("sandbox: non-finite parameter in group " + std::to_string(g));
        const double xr = static_cast<double>(ste_round(x));
        rounded[g](i, c) = xr;
        const double v = mode == SandboxMode::Joint ? xr : x;
        symbols[g](i, c) = v;

        // d/dx of (v / q - t) is 1 in every mode: STE passes rounding through.
        const double d = v / q - t(i, c);
        out.l1 += omega * std::fabs(d) / r;
        out.l2 += omega * (d / r) * (d / r);
        out.distortion += omega * d * d;
        if (grad)
          (*grad)[g](i, c) = (w.l1 * omega * sign(d) / r + 2.0 * w.l2 * omega * d / (r * r)) / e_total;
      }
    }
  }
  out.l1 /= e_total;
  out.l2 /= e_total;
  out.distortion /= e_total;

  const auto coded =
    rate_loss_with_grad({&rounded[0], &rounded[1], &rounded[2]}, scene.detach_fit);
  out.rate_loss = coded.value;
  out.estimated_bits = coded.value * n;

  if (mode != SandboxMode::Warmup && w.rate > 0.0) {
    const auto rl = mode == SandboxMode::Joint
      ? coded
      : rate_loss_with_grad({&symbols[0], &symbols[1], &symbols[2]}, scene.detach_fit);
    out.rate = rl.value;
    if (grad)
      for (std::size_t g = 0; g < 3; ++g) {
        const double chain = w.rate * scene.scale(g);  // d(symbol)/d(param) = q
        auto dst = (*grad)[g].data();
        const auto src = rl.grad[g].data();
        for (std::size_t e = 0; e < dst.size(); ++e)
          dst[e] += chain * src[e];
      }
  }

  out.total = w.l1 * out.l1 + w.l2 * out.l2 + w.rate * out.rate;
  if (!std::isfinite(out.total))
    throw Error("sandbox: non-finite loss (l1 " + std::to_string(out.l1) + ", l2 "
                + std::to_string(out.l2) + ", rate " + std::to_string(out.rate) + ")");
  return out;
}

LossBreakdown
step(SandboxScene& scene, double learning_rate, SandboxMode mode)
{
  std::array<Matrix<double>, 3> grad;
  const auto loss = evaluate(scene, mode, &grad);
  const double scale = learning_rate * static_cast<double>(scene.elements());
  for (std::size_t g = 0; g < 3; ++g) {
    auto p = scene.params[g].data();
    const auto d = grad[g].data();
    for (std::size_t e = 0; e < p.size(); ++e)
      p[e] -= scale * d[e];
  }
  return loss;
}

std::uint64_t
actual_bits(const SandboxScene& scene)
{
  std::uint64_t bytes = 0;
  std::vector<std::int32_t> channel;
  for (std::size_t g = 0; g < 3; ++g) {
    const auto& p = scene.params[g];
    const double q = scene.scale(g);
    channel.resize(p.rows());
    for (std::size_t c = 0; c < p.cols(); ++c) {
      for (std::size_t i = 0; i < p.rows(); ++i)
        channel[i] = static_cast<std::int32_t>(ste_round(p(i, c) * q));
      ByteWriter w;
      bytes += rlc_append(w, channel);
    }
  }
  return 8 * bytes;
}

std::string
TrainTrace::to_csv() const
{
  std::string out = "step,distortion,rate_loss,est_bits,actual_bits\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(
      buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,", r.step, r.distortion, r.rate_loss, r.estimated_bits);
    out += buf;
    if (r.actual_bits)
      out += std::to_string(*r.actual_bits);
    out += '\n';
  }
  return out;
}

TrainTrace
run(SandboxScene& scene, std::size_t steps, std::size_t warmup, double learning_rate, std::size_t interval)
{
  if (warmup >= steps)
    throw InvalidArgument("warmup must be below steps");
  if (interval == 0)
    throw InvalidArgument("trace interval must be positive");

  TrainTrace trace;
  trace.records.reserve(steps + 1);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto mode = s < warmup ? SandboxMode::Warmup : SandboxMode::Joint;
    std::optional<std::uint64_t> bits;
    if (s % interval == 0)
      bits = actual_bits(scene);
    const auto loss = step(scene, learning_rate, mode);
    trace.records.push_back({s, loss.distortion, loss.rate_loss, loss.estimated_bits, bits});
  }
  const auto last = evaluate(scene, SandboxMode::Joint);
  trace.records.push_back(
    {steps, last.distortion, last.rate_loss, last.estimated_bits, actual_bits(scene)});
  return trace;
}

TrainTrace
run(const SandboxConfig& config)
{
  auto scene = make_scene(config);
  return run(scene, config.steps, config.warmup, config.learning_rate, config.trace_interval);
}

AblationResult
run_ablation(const SandboxConfig& config)
{
  auto unconstrained = config;
  unconstrained.weights.rate = 0.0;
  AblationResult r;
  r.baseline = run(unconstrained);
  r.constrained = run(config);
  const auto& b = r.baseline.final();
  const auto& c = r.constrained.final();
  r.bits_ratio = static_cast<double>(*c.actual_bits) / static_cast<double>(*b.actual_bits);
  r.distortion_change = b.distortion > 0.0 ? c.distortion / b.distortion - 1.0 : 0.0;
  return r;
}

}  // namespace voxgs
