#pragma once

#include "voxgs/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace voxgs {

// Plain-text anchor table. Grammar (docs/anchor-format.md has the full one):
//
//   voxgs-anchors 1
//   k <int>
//   m <int>
//   bbox <minx> <miny> <minz> <maxx> <maxy> <maxz>
//   [quant <q_p> <q_o> <q_a> <q_s>]
//   [mlp <hex bytes> | mlp -]
//   anchors <n>
//   end_header
//   n rows of: x y z, 3k offsets, m features, 6 scalings
//
// Header keys may come in any order, each at most once. Blank lines and
// lines starting with '#' are ignored everywhere.
struct AnchorFile {
  FloatAnchorCloud cloud;
  std::optional<QuantParams> quant;
};

// Throws ParseError carrying the 1-based line number of the first problem.
AnchorFile parse_anchor_file(std::string_view text);

// Throws IoError naming the path when the file cannot be read.
AnchorFile read_anchor_file(const std::filesystem::path& path);

// Reals are printed with 17 significant digits, so parsing the output
// reproduces every double exactly.
std::string format_anchor_file(
  const FloatAnchorCloud& cloud, const std::optional<QuantParams>& quant = std::nullopt);

}  // namespace voxgs
