#pragma once

#include "voxgs/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace voxgs {

// Morton codes hold 3 x 21 bits, so no axis may exceed 2^21 cells.
inline constexpr std::uint32_t kMaxGridBits = 21;
inline constexpr std::uint32_t kMaxGridResolution = 1u << kMaxGridBits;

// Exact positive scale factor. Stored as a fraction so that dequantization
// is reproducible bit-for-bit across platforms.
struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool positive() const { return num > 0 && den > 0; }
  Rational reduced() const;
  std::string to_string() const;

  // Accepts "8", "0.125", "1/3". Throws InvalidArgument on anything else.
  static Rational parse(std::string_view text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct QuantParams {
  std::uint32_t q_p = 1024;
  Rational q_o{1, 1};
  Rational q_a{1, 1};
  Rational q_s{8, 1};

  // ceil(log2(q_p)); q_p == 1 gives depth 0 (a single cell).
  std::uint32_t octree_depth() const;

  // Throws InvalidArgument naming the offending parameter.
  void check() const;

  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

struct AttributeLayout {
  static constexpr std::uint32_t kScalingDims = 6;

  std::uint32_t k = 10;  // Gaussians per anchor; offsets are 3k wide
  std::uint32_t m = 50;  // anchor feature width

  std::uint32_t offset_dims() const { return 3 * k; }
  std::uint32_t feature_dims() const { return m; }
  std::uint32_t scaling_dims() const { return kScalingDims; }
  std::uint32_t total_dims() const { return 3 * k + m + kScalingDims; }

  void check() const;

  friend bool operator==(const AttributeLayout&, const AttributeLayout&) = default;
};

struct BoundingBox {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{1.0, 1.0, 1.0};

  double extent(int axis) const { return max[axis] - min[axis]; }
  bool contains(const std::array<double, 3>& p) const;
  void check() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

using Voxel = std::array<std::uint32_t, 3>;

enum class AttributeGroup { Offsets, Features, Scalings };
inline constexpr std::array<AttributeGroup, 3> kAttributeGroups{
  AttributeGroup::Offsets, AttributeGroup::Features, AttributeGroup::Scalings};

std::string_view group_name(AttributeGroup g);

// Voxelized anchor cloud: grid positions and integer attributes.
struct AnchorCloud {
  std::vector<Voxel> positions;
  Matrix<std::int32_t> offsets;   // n x 3k
  Matrix<std::int32_t> features;  // n x m
  Matrix<std::int32_t> scalings;  // n x 6
  AttributeLayout layout;
  QuantParams quant;
  BoundingBox bbox;
  std::vector<std::uint8_t> mlp_blob;

  std::size_t size() const { return positions.size(); }

  // Allocates attribute matrices for `n` anchors under `layout`.
  static AnchorCloud empty_like(
    std::size_t n, const AttributeLayout& layout, const QuantParams& quant,
    const BoundingBox& bbox);

  Matrix<std::int32_t>& group(AttributeGroup g);
  const Matrix<std::int32_t>& group(AttributeGroup g) const;
  const Rational& scale(AttributeGroup g) const;

  friend bool operator==(const AnchorCloud&, const AnchorCloud&) = default;
};

// Real-valued anchors before quantization.
struct FloatAnchorCloud {
  std::vector<std::array<double, 3>> positions;
  Matrix<double> offsets;
  Matrix<double> features;
  Matrix<double> scalings;
  AttributeLayout layout;
  BoundingBox bbox;
  std::vector<std::uint8_t> mlp_blob;

  std::size_t size() const { return positions.size(); }

  static FloatAnchorCloud empty_like(
    std::size_t n, const AttributeLayout& layout, const BoundingBox& bbox);

  Matrix<double>& group(AttributeGroup g);
  const Matrix<double>& group(AttributeGroup g) const;

  friend bool operator==(const FloatAnchorCloud&, const FloatAnchorCloud&) = default;
};

struct Finding {
  enum class Kind { DuplicatePosition, OutOfRange, RaggedAttributes };
  Kind kind;
  std::size_t anchor;  // index of the offending anchor (second one for duplicates)
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  std::size_t count(Finding::Kind kind) const;
};

// Reports every violated cloud invariant. Never throws.
ValidationReport validate(const AnchorCloud& cloud);

}  // namespace voxgs
