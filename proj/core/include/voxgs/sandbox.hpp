#pragma once

#include "voxgs/matrix.hpp"
#include "voxgs/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace voxgs {

struct LossWeights {
  double l1 = 0.2;
  double l2 = 0.8;
  double rate = 1e-4;
};

struct SandboxConfig {
  std::size_t anchors = 400;
  AttributeLayout layout{10, 50};
  QuantParams quant{1024, {1, 1}, {1, 1}, {8, 1}};
  LossWeights weights;
  double learning_rate = 0.02;
  std::size_t steps = 500;
  std::size_t warmup = 100;
  std::size_t trace_interval = 50;
  bool detach_fit = false;
  double init_noise = 0.3;         // params start at target plus this much Gaussian noise
  double visibility_spread = 8.0;  // anchor weights are u^spread, u uniform, rescaled to mean 1
  std::uint64_t seed = 7;

  // Throws InvalidArgument, e.g. when warmup >= steps.
  void check() const;
};

// Trainable attribute groups against a fixed target. Anchors are taken to
// be in Morton order already, so coding order is row order.
//
// Each anchor carries a visibility weight (mean 1, at most spread + 1)
// standing in for how much it contributes to rendered pixels. Most anchors
// are nearly invisible. Distortion terms are weighted by
// it and normalized by each target group's range.
struct SandboxScene {
  std::array<Matrix<double>, 3> target;
  std::array<Matrix<double>, 3> params;
  std::vector<double> visibility;
  std::array<double, 3> ranges{1.0, 1.0, 1.0};
  QuantParams quant;
  LossWeights weights;
  bool detach_fit = false;

  std::size_t anchors() const { return visibility.size(); }
  std::size_t elements() const;
  double scale(std::size_t group) const;
};

// Zero-inflated Laplace offsets, correlated Gaussian features and narrow
// scalings around -2; params are the target plus noise.
SandboxScene make_scene(const SandboxConfig& config);

enum class SandboxMode {
  Warmup,    // continuous values, distortion only
  Identity,  // continuous values, full loss; exact gradients for checking
  Joint,     // rounded forward pass with straight-through gradients
};

struct LossBreakdown {
  double total = 0.0;
  double l1 = 0.0;          // weighted mean |d| / range
  double l2 = 0.0;          // weighted mean (d / range)^2
  double rate = 0.0;        // rate term of the objective (0 in warmup)
  double distortion = 0.0;  // weighted mean d^2 in attribute units
  double rate_loss = 0.0;   // estimated bits per anchor of the rounded params
  double estimated_bits = 0.0;
};

// Loss at the current params. When `grad` is given it receives
// d(total)/d(params) with the shapes of scene.params.
LossBreakdown evaluate(
  const SandboxScene& scene, SandboxMode mode, std::array<Matrix<double>, 3>* grad = nullptr);

// One gradient-descent update. The step is learning_rate * E * gradient,
// E being the element count, so the rate is per element and does not
// depend on scene size. Returns the loss before the update; a non-finite
// loss throws Error.
LossBreakdown step(SandboxScene& scene, double learning_rate, SandboxMode mode);

// RLC size of the rounded params, one stream per channel.
std::uint64_t actual_bits(const SandboxScene& scene);

struct TraceRecord {
  std::size_t step = 0;
  double distortion = 0.0;
  double rate_loss = 0.0;
  double estimated_bits = 0.0;
  std::optional<std::uint64_t> actual_bits;
};

struct TrainTrace {
  std::vector<TraceRecord> records;

  // The last record is the evaluation after the final update.
  const TraceRecord& final() const { return records.back(); }
  std::string to_csv() const;
};

// `warmup` distortion-only steps, then joint steps up to `steps`. Actual
// bits are measured every `interval` steps and after the last update.
TrainTrace run(
  SandboxScene& scene, std::size_t steps, std::size_t warmup, double learning_rate,
  std::size_t interval = 50);
TrainTrace run(const SandboxConfig& config);

struct AblationResult {
  TrainTrace baseline;     // rate weight 0
  TrainTrace constrained;  // configured rate weight
  double bits_ratio = 0.0;         // constrained / baseline final actual bits
  double distortion_change = 0.0;  // relative change of the final distortion
};

AblationResult run_ablation(const SandboxConfig& config);

}  // namespace voxgs
