#pragma once

#include "voxgs/matrix.hpp"
#include "voxgs/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace voxgs {

// Backward pass of STE_ROUND: rounding is treated as the identity.
inline constexpr double kSteGradient = 1.0;

struct SteGrad {
  std::int64_t forward_value = 0;
  bool grad_passthrough = true;
};

// Nearest integer, ties away from zero. Throws InvalidArgument on
// non-finite input or magnitudes beyond 2^62.
std::int64_t ste_round(double x);
SteGrad ste_round_with_grad(double x);

struct PositionQuantization {
  std::vector<Voxel> voxels;          // duplicate-free, in first-occurrence order
  std::vector<std::size_t> source;    // input index that produced each voxel
  std::vector<std::size_t> voxel_of;  // for every input index, its voxel
};

// Maps world positions onto the [0, q_p)^3 grid of `bbox` and drops
// duplicates, keeping the first occurrence.
PositionQuantization quantize_positions(
  std::span<const std::array<double, 3>> points, std::uint32_t q_p,
  const BoundingBox& bbox);

// Single-axis grid coordinate; exposed for the dequantization round trip.
std::uint32_t voxel_coordinate(double x, double lo, double extent, std::uint32_t q_p);
double voxel_center(std::uint32_t g, double lo, double extent, std::uint32_t q_p);

Matrix<std::int32_t> quantize_features(const Matrix<double>& f, const Rational& q);
Matrix<double> dequantize_features(const Matrix<std::int32_t>& fq, const Rational& q);

double dequantize_value(std::int32_t v, const Rational& q);

// Full voxelization of a float cloud. Attribute rows of dropped duplicates
// are discarded along with their positions.
AnchorCloud quantize_cloud(const FloatAnchorCloud& cloud, const QuantParams& quant);
FloatAnchorCloud dequantize_cloud(const AnchorCloud& cloud);

}  // namespace voxgs
