#pragma once

#include "voxgs/model.hpp"
#include "voxgs/rate_proxy.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voxgs {

struct SyntheticOptions {
  BoundingBox bbox;
  double laplace_scale = 2.0;     // scale of freshly drawn values, in quantized units
  double base_repeat = 0.7;       // repeat probability at run_bias = 0
  double offset_zero_prob = 0.5;  // fresh offsets are exactly zero this often
  double scaling_center = -2.0;   // log-scales cluster here
  std::size_t mlp_bytes = 0;
};

// Seeded scene. Positions are uniform in the box; along their Morton order
// every attribute channel is a Markov chain that repeats the previous
// value with probability base_repeat + (1 - base_repeat) * run_bias and
// otherwise draws afresh with scale laplace_scale * (1 - run_bias)^2.
// Offsets are zero-inflated, features centred on zero, scalings narrow
// (an eighth of the scale) around scaling_center. run_bias = 1 makes every
// channel constant. run_bias outside [0, 1] throws InvalidArgument.
FloatAnchorCloud generate_synthetic(
  std::uint64_t seed, std::size_t anchors, const AttributeLayout& layout, double run_bias,
  const SyntheticOptions& options = {});

struct CorpusScene {
  std::uint64_t seed = 0;
  double run_bias = 0.0;
  double laplace_scale = 1.0;
  std::size_t anchors = 0;
};

// Deterministic plan: run_bias spreads evenly over [0, 0.9]; scales cover
// [0.5, 8] and sizes [2000, 20000) on a log scale in golden-ratio steps so
// that the three factors are decorrelated.
std::vector<CorpusScene> calibration_corpus(std::size_t scenes = 50, std::uint64_t seed = 1);

// Small layout used for corpus scenes: 3 + 4 + 6 channels per anchor.
inline constexpr AttributeLayout kCalibrationLayout{1, 4};

// Generates, quantizes and Morton-sorts one scene, then returns every
// attribute channel as its own sequence.
CalibrationSample scene_channels(
  const CorpusScene& scene, const AttributeLayout& layout = kCalibrationLayout,
  const QuantParams& quant = {});

}  // namespace voxgs
