#include "voxgs/anchor_file.hpp"

#include "voxgs/error.hpp"
#include "voxgs/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <vector>

namespace voxgs {

namespace {

  constexpr std::string_view kMagic = "voxgs-anchors";

  struct Line {
    std::size_t number = 0;
    std::vector<std::string_view> tokens;
  };

  // Yields non-empty, non-comment lines split on blanks and tabs.
  class LineReader {
  public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(Line& line)
    {
      while (pos_ < text_.size()) {
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos)
          end = text_.size();
        auto raw = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++number_;
        if (!raw.empty() && raw.back() == '\r')
          raw.remove_suffix(1);
        line.number = number_;
        line.tokens.clear();
        std::size_t i = 0;
        while (i < raw.size()) {
          while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t'))
            ++i;
          const std::size_t start = i;
          while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t')
            ++i;
          if (i > start)
            line.tokens.push_back(raw.substr(start, i - start));
        }
        if (line.tokens.empty() || line.tokens.front().front() == '#')
          continue;
        return true;
      }
      return false;
    }

    std::size_t last_line() const { return number_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t number_ = 0;
  };

  double to_real(std::string_view tok, std::size_t line)
  {
    if (!tok.empty() && tok.front() == '+')
      tok.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || end != tok.data() + tok.size())
      throw ParseError(line, "not a number: '" + std::string(tok) + "'");
    if (!std::isfinite(v))
      throw ParseError(line, "non-finite value '" + std::string(tok) + "'");
    return v;
  }

  std::uint64_t to_uint(std::string_view tok, std::size_t line, std::uint64_t max)
  {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || end != tok.data() + tok.size() || v > max)
      throw ParseError(line, "expected an integer up to " + std::to_string(max) + ", got '"
                               + std::string(tok) + "'");
    return v;
  }

  int hex_digit(char c)
  {
    if (c >= '0' && c <= '9')
      return c - '0';
    if (c >= 'a' && c <= 'f')
      return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
      return c - 'A' + 10;
    return -1;
  }

  void expect_arity(const Line& line, std::size_t n)
  {
    if (line.tokens.size() != n)
      throw ParseError(
        line.number, "'" + std::string(line.tokens.front()) + "' takes "
          + std::to_string(n - 1) + " value(s)");
  }

}  // namespace

AnchorFile
parse_anchor_file(std::string_view text)
{
  LineReader reader(text);
  Line line;

  if (!reader.next(line) || line.tokens.front() != kMagic)
    throw ParseError(line.number ? line.number : 1, "missing 'voxgs-anchors' header line");
  expect_arity(line, 2);
  if (line.tokens[1] != "1")
    throw ParseError(line.number, "unsupported format version " + std::string(line.tokens[1]));

  AnchorFile out;
  AttributeLayout layout;
  BoundingBox bbox;
  std::uint64_t anchors = 0;
  std::set<std::string, std::less<>> seen;
  std::vector<std::uint8_t> mlp;

  for (;;) {
    if (!reader.next(line))
      throw ParseError(reader.last_line(), "header is not terminated by 'end_header'");
    const auto key = line.tokens.front();
    if (key == "end_header")
      break;
    if (!seen.insert(std::string(key)).second)
      throw ParseError(line.number, "duplicate header key '" + std::string(key) + "'");

    if (key == "k") {
      expect_arity(line, 2);
      layout.k = static_cast<std::uint32_t>(to_uint(line.tokens[1], line.number, 1u << 20));
    } else if (key == "m") {
      expect_arity(line, 2);
      layout.m = static_cast<std::uint32_t>(to_uint(line.tokens[1], line.number, 1u << 20));
    } else if (key == "bbox") {
      expect_arity(line, 7);
      for (int a = 0; a < 3; ++a) {
        bbox.min[a] = to_real(line.tokens[1 + a], line.number);
        bbox.max[a] = to_real(line.tokens[4 + a], line.number);
      }
      try {
        bbox.check();
      } catch (const InvalidArgument& e) {
        throw ParseError(line.number, e.what());
      }
    } else if (key == "quant") {
      expect_arity(line, 5);
      try {
        QuantParams q;
        q.q_p = static_cast<std::uint32_t>(
          to_uint(line.tokens[1], line.number, std::numeric_limits<std::uint32_t>::max()));
        q.q_o = Rational::parse(line.tokens[2]);
        q.q_a = Rational::parse(line.tokens[3]);
        q.q_s = Rational::parse(line.tokens[4]);
        q.check();
        out.quant = q;
      } catch (const InvalidArgument& e) {
        throw ParseError(line.number, e.what());
      }
    } else if (key == "mlp") {
      expect_arity(line, 2);
      const auto hex = line.tokens[1];
      if (hex != "-") {
        if (hex.size() % 2 != 0)
          throw ParseError(line.number, "mlp blob has an odd number of hex digits");
        mlp.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2) {
          const int hi = hex_digit(hex[i]);
          const int lo = hex_digit(hex[i + 1]);
          if (hi < 0 || lo < 0)
            throw ParseError(line.number, "mlp blob is not hexadecimal");
          mlp.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        }
      }
    } else if (key == "anchors") {
      expect_arity(line, 2);
      anchors = to_uint(line.tokens[1], line.number, std::uint64_t{1} << 32);
    } else {
      throw ParseError(line.number, "unknown header key '" + std::string(key) + "'");
    }
  }

  for (const char* required : {"k", "m", "bbox", "anchors"})
    if (!seen.contains(required))
      throw ParseError(line.number, std::string("header lacks '") + required + "'");
  try {
    layout.check();
  } catch (const InvalidArgument& e) {
    throw ParseError(line.number, e.what());
  }

  const std::size_t width = 3 + layout.total_dims();
  auto cloud = FloatAnchorCloud::empty_like(0, layout, bbox);
  cloud.mlp_blob = std::move(mlp);
  const std::size_t n_o = layout.offset_dims();
  const std::size_t n_a = layout.feature_dims();
  std::vector<double> row(width);

  for (std::uint64_t i = 0; i < anchors; ++i) {
    if (!reader.next(line))
      throw ParseError(
        reader.last_line(), "expected " + std::to_string(anchors) + " anchor rows, found "
          + std::to_string(i));
    if (line.tokens.size() != width)
      throw ParseError(
        line.number, "row has " + std::to_string(line.tokens.size()) + " values, expected "
          + std::to_string(width));
    for (std::size_t c = 0; c < width; ++c)
      row[c] = to_real(line.tokens[c], line.number);
    cloud.positions.push_back({row[0], row[1], row[2]});
    const std::span<const double> attrs(row.data() + 3, row.size() - 3);
    cloud.offsets.append_row(attrs.subspan(0, n_o));
    cloud.features.append_row(attrs.subspan(n_o, n_a));
    cloud.scalings.append_row(attrs.subspan(n_o + n_a));
  }
  if (reader.next(line))
    throw ParseError(line.number, "more rows than the declared anchor count");

  out.cloud = std::move(cloud);
  return out;
}

AnchorFile
read_anchor_file(const std::filesystem::path& path)
{
  const auto bytes = read_file(path);
  try {
    return parse_anchor_file(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.reason(), path.string());
  }
}

std::string
format_anchor_file(const FloatAnchorCloud& cloud, const std::optional<QuantParams>& quant)
{
  std::string out;
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };

  out += "voxgs-anchors 1\n";
  out += "k " + std::to_string(cloud.layout.k) + "\n";
  out += "m " + std::to_string(cloud.layout.m) + "\n";
  out += "bbox";
  for (double v : cloud.bbox.min) {
    out += ' ';
    real(v);
  }
  for (double v : cloud.bbox.max) {
    out += ' ';
    real(v);
  }
  out += '\n';
  if (quant)
    out += "quant " + std::to_string(quant->q_p) + " " + quant->q_o.to_string() + " "
      + quant->q_a.to_string() + " " + quant->q_s.to_string() + "\n";
  if (!cloud.mlp_blob.empty()) {
    static constexpr char kHex[] = "0123456789abcdef";
    out += "mlp ";
    for (auto b : cloud.mlp_blob) {
      out += kHex[b >> 4];
      out += kHex[b & 15];
    }
    out += '\n';
  }
  out += "anchors " + std::to_string(cloud.size()) + "\n";
  out += "end_header\n";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (a)
        out += ' ';
      real(cloud.positions[i][a]);
    }
    for (const auto* g : {&cloud.offsets, &cloud.features, &cloud.scalings})
      for (double v : g->row(i)) {
        out += ' ';
        real(v);
      }
    out += '\n';
  }
  return out;
}

}  // namespace voxgs
