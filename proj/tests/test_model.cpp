#include "voxgs/error.hpp"
#include "voxgs/model.hpp"

#include <doctest.h>

using namespace voxgs;

TEST_CASE("rational scales parse integers, decimals and fractions")
{
  CHECK(Rational::parse("8") == Rational{8, 1});
  CHECK(Rational::parse("0.125") == Rational{1, 8});
  CHECK(Rational::parse("1/3") == Rational{1, 3});
  CHECK(Rational::parse("2/6") == Rational{1, 3});
  CHECK(Rational::parse("1.5") == Rational{3, 2});
  CHECK(Rational::parse("1/3").to_string() == "1/3");
  CHECK(Rational::parse("8").to_string() == "8");
  CHECK_THROWS_AS(Rational::parse(""), InvalidArgument);
  CHECK_THROWS_AS(Rational::parse("abc"), InvalidArgument);
  CHECK_THROWS_AS(Rational::parse("1/0"), InvalidArgument);
  CHECK_THROWS_AS(Rational::parse("-1"), InvalidArgument);
}

TEST_CASE("quant params reject non-positive scales and oversized grids")
{
  QuantParams q;
  CHECK_NOTHROW(q.check());
  q.q_s = {0, 1};
  CHECK_THROWS_WITH_AS(q.check(), doctest::Contains("quant scale must be positive"), InvalidArgument);
  q = {};
  q.q_p = 0;
  CHECK_THROWS_AS(q.check(), InvalidArgument);
  q.q_p = kMaxGridResolution;
  CHECK_NOTHROW(q.check());
  q.q_p = kMaxGridResolution + 1;
  CHECK_THROWS_AS(q.check(), InvalidArgument);
}

TEST_CASE("octree depth is ceil(log2 q_p)")
{
  auto depth = [](std::uint32_t qp) { return QuantParams{qp, {1, 1}, {1, 1}, {8, 1}}.octree_depth(); };
  CHECK(depth(1) == 0);
  CHECK(depth(2) == 1);
  CHECK(depth(3) == 2);
  CHECK(depth(200) == 8);
  CHECK(depth(256) == 8);
  CHECK(depth(1024) == 10);
  CHECK(depth(1025) == 11);
  CHECK(depth(kMaxGridResolution) == 21);
}

TEST_CASE("attribute layout width is 3k + m + 6")
{
  for (std::uint32_t k = 1; k < 12; ++k)
    for (std::uint32_t m = 1; m < 60; m += 7) {
      AttributeLayout l{k, m};
      CHECK(l.total_dims() == 3 * k + m + 6);
      CHECK(l.offset_dims() + l.feature_dims() + l.scaling_dims() == l.total_dims());
    }
  CHECK(AttributeLayout{}.total_dims() == 86);
  CHECK_THROWS_AS((AttributeLayout{0, 5}.check()), InvalidArgument);
}

TEST_CASE("validate reports every violated invariant")
{
  const AttributeLayout layout{1, 2};
  const QuantParams quant{4, {1, 1}, {1, 1}, {8, 1}};

  SUBCASE("empty cloud is valid")
  {
    CHECK(validate(AnchorCloud::empty_like(0, layout, quant, {})).ok());
  }
  SUBCASE("two identical positions give one duplicate finding")
  {
    auto c = AnchorCloud::empty_like(3, layout, quant, {});
    c.positions = {{1, 2, 3}, {0, 0, 0}, {1, 2, 3}};
    const auto r = validate(c);
    CHECK(r.count(Finding::Kind::DuplicatePosition) == 1);
    CHECK(r.findings.size() == 1);
    CHECK(r.findings[0].anchor == 2);
  }
  SUBCASE("a component equal to q_p is out of range")
  {
    auto c = AnchorCloud::empty_like(2, layout, quant, {});
    c.positions = {{0, 0, 0}, {0, 4, 0}};
    const auto r = validate(c);
    CHECK(r.count(Finding::Kind::OutOfRange) == 1);
    c.positions[1] = {3, 3, 3};
    CHECK(validate(c).ok());
  }
  SUBCASE("ragged attribute groups are reported")
  {
    auto c = AnchorCloud::empty_like(2, layout, quant, {});
    c.positions = {{0, 0, 0}, {1, 0, 0}};
    c.features = Matrix<std::int32_t>(2, 3);
    CHECK(validate(c).count(Finding::Kind::RaggedAttributes) == 1);
    c.scalings = Matrix<std::int32_t>(1, 6);
    CHECK(validate(c).count(Finding::Kind::RaggedAttributes) == 2);
  }
}

TEST_CASE("group accessors map O, A, S to their matrices and scales")
{
  auto c = AnchorCloud::empty_like(2, {2, 3}, {16, {1, 1}, {1, 2}, {8, 1}}, {});
  CHECK(c.group(AttributeGroup::Offsets).cols() == 6);
  CHECK(c.group(AttributeGroup::Features).cols() == 3);
  CHECK(c.group(AttributeGroup::Scalings).cols() == 6);
  CHECK(c.scale(AttributeGroup::Features) == Rational{1, 2});
  CHECK(group_name(AttributeGroup::Offsets) == "O");
  CHECK(group_name(AttributeGroup::Features) == "A");
  CHECK(group_name(AttributeGroup::Scalings) == "S");
}
