#pragma once

#include "voxgs/model.hpp"

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace voxgs::test {

// Morton code built by concatenating bit characters, most significant
// level first, z then y then x inside each level.
inline std::uint64_t morton_string_oracle(std::uint32_t x, std::uint32_t y, std::uint32_t z)
{
  const std::string bx = std::bitset<21>(x).to_string();
  const std::string by = std::bitset<21>(y).to_string();
  const std::string bz = std::bitset<21>(z).to_string();
  std::string s;
  for (std::size_t i = 0; i < 21; ++i) {
    s += bz[i];
    s += by[i];
    s += bx[i];
  }
  return std::stoull(s, nullptr, 2);
}

// Octree with heap-allocated children, built by inserting points one by
// one from the root.
class PointerOctree {
public:
  explicit PointerOctree(std::uint32_t depth) : depth_(depth) {}

  void insert(const Voxel& v)
  {
    Node* node = &root_;
    for (std::uint32_t level = 0; level < depth_; ++level) {
      const std::uint32_t shift = depth_ - 1 - level;
      const unsigned child = (((v[2] >> shift) & 1u) << 2) | (((v[1] >> shift) & 1u) << 1)
        | ((v[0] >> shift) & 1u);
      if (!node->child[child])
        node->child[child] = std::make_unique<Node>();
      node = node->child[child].get();
    }
  }

  // Nodes above the leaf level, i.e. those owning an occupancy byte.
  std::size_t internal_nodes() const { return count(root_, 0); }

  // Occupancy bytes in level order.
  std::vector<std::uint8_t> level_order() const
  {
    std::vector<std::uint8_t> out;
    std::vector<const Node*> level{&root_};
    for (std::uint32_t d = 0; d < depth_ && !level.empty(); ++d) {
      std::vector<const Node*> next;
      for (const Node* n : level) {
        std::uint8_t mask = 0;
        for (unsigned c = 0; c < 8; ++c)
          if (n->child[c]) {
            mask |= static_cast<std::uint8_t>(1u << c);
            next.push_back(n->child[c].get());
          }
        out.push_back(mask);
      }
      level.swap(next);
    }
    return out;
  }

private:
  struct Node {
    std::array<std::unique_ptr<Node>, 8> child;
  };

  std::size_t count(const Node& n, std::uint32_t level) const
  {
    if (level == depth_)
      return 0;
    std::size_t total = 1;
    for (const auto& c : n.child)
      if (c)
        total += count(*c, level + 1);
    return total;
  }

  std::uint32_t depth_;
  Node root_;
};

// Number of maximal runs, counted by direct comparison.
inline std::size_t count_runs(const std::vector<std::int32_t>& v)
{
  std::size_t runs = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i == 0 || v[i] != v[i - 1])
      ++runs;
  return runs;
}

inline std::size_t leb128_size(std::uint64_t v)
{
  std::size_t n = 1;
  for (; v >= 128; v /= 128)
    ++n;
  return n;
}

// Serialized RLC size derived token by token from the format definition.
inline std::size_t rlc_size_oracle(const std::vector<std::int32_t>& v)
{
  std::size_t bytes = leb128_size(v.size());
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i])
      ++j;
    const std::int64_t x = v[i];
    const std::uint64_t zz = x >= 0 ? 2 * static_cast<std::uint64_t>(x) : 2 * static_cast<std::uint64_t>(-x) - 1;
    bytes += leb128_size(j - i) + leb128_size(zz);
    i = j;
  }
  return bytes;
}

inline std::int32_t discrete_laplace(std::mt19937_64& rng, double b)
{
  std::exponential_distribution<double> e(1.0 / b);
  return static_cast<std::int32_t>(std::lround(e(rng) - e(rng)));
}

// Random valid cloud with `n` distinct voxels (fewer when the grid is
// smaller) on a grid whose octree depth is `depth`. Attribute channels mix
// constants, runs, small Laplace values and extreme 32-bit values.
inline AnchorCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::uint32_t depth)
{
  QuantParams quant;
  const std::uint32_t hi = 1u << depth;
  const std::uint32_t lo = depth == 0 ? 1 : (1u << (depth - 1)) + 1;
  quant.q_p = std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  quant.q_o = {std::uniform_int_distribution<std::uint64_t>(1, 16)(rng), 1};
  quant.q_a = {1, std::uniform_int_distribution<std::uint64_t>(1, 4)(rng)};
  quant.q_s = {8, 1};

  AttributeLayout layout{
    std::uniform_int_distribution<std::uint32_t>(1, 3)(rng),
    std::uniform_int_distribution<std::uint32_t>(1, 8)(rng)};
  BoundingBox bbox{{-1.5, 0.0, 2.0}, {1.5, 4.0, 2.5}};

  const std::uint64_t cells = std::uint64_t{quant.q_p} * quant.q_p * quant.q_p;
  n = static_cast<std::size_t>(std::min<std::uint64_t>(n, cells));
  auto cloud = AnchorCloud::empty_like(n, layout, quant, bbox);

  std::uniform_int_distribution<std::uint32_t> coord(0, quant.q_p - 1);
  std::set<Voxel> used;
  if (cells <= 4 * static_cast<std::uint64_t>(n)) {
    // Dense: enumerate the grid and pick a random subset.
    std::vector<Voxel> all;
    for (std::uint32_t x = 0; x < quant.q_p; ++x)
      for (std::uint32_t y = 0; y < quant.q_p; ++y)
        for (std::uint32_t z = 0; z < quant.q_p; ++z)
          all.push_back({x, y, z});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(n);
    cloud.positions = all;
  } else {
    for (std::size_t i = 0; i < n;) {
      Voxel v{coord(rng), coord(rng), coord(rng)};
      if (used.insert(v).second)
        cloud.positions[i++] = v;
    }
  }

  std::uniform_int_distribution<int> kind(0, 4);
  for (auto g : kAttributeGroups) {
    auto& mat = cloud.group(g);
    for (std::size_t c = 0; c < mat.cols(); ++c) {
      const int k = kind(rng);
      std::int32_t run_value = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::int32_t v = 0;
        switch (k) {
          case 0:
            v = 3;
            break;
          case 1:
            if (i == 0 || rng() % 8 == 0)
              run_value = discrete_laplace(rng, 4.0);
            v = run_value;
            break;
          case 2:
            v = discrete_laplace(rng, 1.5);
            break;
          case 3:
            v = static_cast<std::int32_t>(rng());
            break;
          default:
            v = (rng() & 1) ? INT32_MIN : INT32_MAX;
            break;
        }
        mat(i, c) = v;
      }
    }
  }
  cloud.mlp_blob.resize(std::uniform_int_distribution<std::size_t>(0, 300)(rng));
  for (auto& b : cloud.mlp_blob)
    b = static_cast<std::uint8_t>(rng());
  return cloud;
}

}  // namespace voxgs::test
