#include "voxgs/model.hpp"

#include "voxgs/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

namespace voxgs {

Rational
Rational::reduced() const
{
  if (num == 0 || den == 0)
    return *this;
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string
Rational::to_string() const
{
  if (den == 1)
    return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

  std::uint64_t parse_u64(std::string_view digits, std::string_view whole)
  {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
      throw InvalidArgument("malformed scale '" + std::string(whole) + "'");
    return v;
  }

}  // namespace

Rational
Rational::parse(std::string_view text)
{
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational r{parse_u64(text.substr(0, slash), text), parse_u64(text.substr(slash + 1), text)};
    if (r.den == 0)
      throw InvalidArgument("malformed scale '" + std::string(text) + "'");
    return r.reduced();
  }

  auto dot = text.find('.');
  if (dot == std::string_view::npos)
    return Rational{parse_u64(text, text), 1};

  auto int_part = text.substr(0, dot);
  auto frac_part = text.substr(dot + 1);
  if (frac_part.size() > 12 || (int_part.empty() && frac_part.empty()))
    throw InvalidArgument("malformed scale '" + std::string(text) + "'");

  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i)
    den *= 10;
  const std::uint64_t ip = int_part.empty() ? 0 : parse_u64(int_part, text);
  const std::uint64_t fp = frac_part.empty() ? 0 : parse_u64(frac_part, text);
  if (ip > (UINT64_MAX - fp) / den)
    throw InvalidArgument("scale '" + std::string(text) + "' out of range");
  return Rational{ip * den + fp, den}.reduced();
}

std::uint32_t
QuantParams::octree_depth() const
{
  std::uint32_t depth = 0;
  while ((std::uint64_t{1} << depth) < q_p)
    ++depth;
  return depth;
}

void
QuantParams::check() const
{
  if (q_p == 0)
    throw InvalidArgument("quant scale must be positive (q_p)");
  if (q_p > kMaxGridResolution)
    throw InvalidArgument("q_p exceeds 2^21, Morton codes would overflow");
  if (!q_o.positive())
    throw InvalidArgument("quant scale must be positive (q_o)");
  if (!q_a.positive())
    throw InvalidArgument("quant scale must be positive (q_a)");
  if (!q_s.positive())
    throw InvalidArgument("quant scale must be positive (q_s)");
}

void
AttributeLayout::check() const
{
  if (k == 0 || m == 0)
    throw InvalidArgument("attribute layout requires k >= 1 and m >= 1");
}

bool
BoundingBox::contains(const std::array<double, 3>& p) const
{
  for (int a = 0; a < 3; ++a)
    if (!(p[a] >= min[a] && p[a] <= max[a]))
      return false;
  return true;
}

void
BoundingBox::check() const
{
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(min[a]) || !std::isfinite(max[a]))
      throw InvalidArgument("bounding box must be finite");
    if (max[a] < min[a])
      throw InvalidArgument("bounding box max below min");
  }
}

std::string_view
group_name(AttributeGroup g)
{
  switch (g) {
  case AttributeGroup::Offsets: return "O";
  case AttributeGroup::Features: return "A";
  case AttributeGroup::Scalings: return "S";
  }
  return "?";
}

AnchorCloud
AnchorCloud::empty_like(
  std::size_t n, const AttributeLayout& layout, const QuantParams& quant,
  const BoundingBox& bbox)
{
  AnchorCloud c;
  c.positions.resize(n);
  c.offsets = Matrix<std::int32_t>(n, layout.offset_dims());
  c.features = Matrix<std::int32_t>(n, layout.feature_dims());
  c.scalings = Matrix<std::int32_t>(n, layout.scaling_dims());
  c.layout = layout;
  c.quant = quant;
  c.bbox = bbox;
  return c;
}

Matrix<std::int32_t>&
AnchorCloud::group(AttributeGroup g)
{
  switch (g) {
  case AttributeGroup::Offsets: return offsets;
  case AttributeGroup::Features: return features;
  case AttributeGroup::Scalings: break;
  }
  return scalings;
}

const Matrix<std::int32_t>&
AnchorCloud::group(AttributeGroup g) const
{
  return const_cast<AnchorCloud*>(this)->group(g);
}

const Rational&
AnchorCloud::scale(AttributeGroup g) const
{
  switch (g) {
  case AttributeGroup::Offsets: return quant.q_o;
  case AttributeGroup::Features: return quant.q_a;
  case AttributeGroup::Scalings: break;
  }
  return quant.q_s;
}

FloatAnchorCloud
FloatAnchorCloud::empty_like(
  std::size_t n, const AttributeLayout& layout, const BoundingBox& bbox)
{
  FloatAnchorCloud c;
  c.positions.resize(n);
  c.offsets = Matrix<double>(n, layout.offset_dims());
  c.features = Matrix<double>(n, layout.feature_dims());
  c.scalings = Matrix<double>(n, layout.scaling_dims());
  c.layout = layout;
  c.bbox = bbox;
  return c;
}

Matrix<double>&
FloatAnchorCloud::group(AttributeGroup g)
{
  switch (g) {
  case AttributeGroup::Offsets: return offsets;
  case AttributeGroup::Features: return features;
  case AttributeGroup::Scalings: break;
  }
  return scalings;
}

const Matrix<double>&
FloatAnchorCloud::group(AttributeGroup g) const
{
  return const_cast<FloatAnchorCloud*>(this)->group(g);
}

std::size_t
ValidationReport::count(Finding::Kind kind) const
{
  return std::count_if(findings.begin(), findings.end(), [kind](const Finding& f) {
    return f.kind == kind;
  });
}

ValidationReport
validate(const AnchorCloud& cloud)
{
  ValidationReport report;
  const std::size_t n = cloud.size();

  std::map<Voxel, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = cloud.positions[i];
    if (p[0] >= cloud.quant.q_p || p[1] >= cloud.quant.q_p || p[2] >= cloud.quant.q_p) {
      report.findings.push_back(
        {Finding::Kind::OutOfRange, i,
         "anchor " + std::to_string(i) + " lies outside [0, "
           + std::to_string(cloud.quant.q_p) + ")^3"});
    }
    auto [it, inserted] = first_seen.emplace(p, i);
    if (!inserted) {
      report.findings.push_back(
        {Finding::Kind::DuplicatePosition, i,
         "anchor " + std::to_string(i) + " duplicates anchor "
           + std::to_string(it->second)});
    }
  }

  auto check_shape = [&](AttributeGroup g, std::size_t cols) {
    const auto& mat = cloud.group(g);
    if (mat.rows() != n || mat.cols() != cols) {
      report.findings.push_back(
        {Finding::Kind::RaggedAttributes, mat.rows(),
         std::string("group ") + std::string(group_name(g)) + " is "
           + std::to_string(mat.rows()) + "x" + std::to_string(mat.cols())
           + ", expected " + std::to_string(n) + "x" + std::to_string(cols)});
    }
  };
  check_shape(AttributeGroup::Offsets, cloud.layout.offset_dims());
  check_shape(AttributeGroup::Features, cloud.layout.feature_dims());
  check_shape(AttributeGroup::Scalings, cloud.layout.scaling_dims());

  return report;
}

}  // namespace voxgs
