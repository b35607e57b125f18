#include <cdfo/harness/region_spec.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <variant>

namespace {

using namespace cdfo;
using cdfo::harness::parse_region;
using cdfo::harness::RegionSpecError;

TEST(RegionSpec, BoxShorthandAndLongForm) {
  const ConvexRegion a = parse_region("box(-1,1)^2");
  const ConvexRegion b = parse_region("box(lower=[-1, -1], upper=[1, 1])");
  EXPECT_EQ(a.dimension(), 2);
  EXPECT_EQ(b.dimension(), 2);
  const Vector y{{3.0, -0.5}};
  EXPECT_EQ(project(a, y).point, project(b, y).point);
  EXPECT_EQ(project(a, y).point, (Vector{{1.0, -0.5}}));
}

TEST(RegionSpec, BallForms) {
  const ConvexRegion a = parse_region("ball(center=[0, 0, 0], radius=2)");
  const ConvexRegion b = parse_region("ball(2)^3");
  const Vector y{{0.0, 0.0, 5.0}};
  EXPECT_LE((project(a, y).point - Vector{{0.0, 0.0, 2.0}}).norm(), 1e-15);
  EXPECT_EQ(project(a, y).point, project(b, y).point);
}

TEST(RegionSpec, HalfspacesAndIntersections) {
  const ConvexRegion r = parse_region(
      "intersect(box(0, 1)^2, halfspaces(halfspace(normal=[1, 1], offset=1), halfspace(normal=[-1, 0], offset=-0.1)))");
  EXPECT_EQ(r.dimension(), 2);
  EXPECT_TRUE(contains(r, Vector{{0.3, 0.3}}));
  EXPECT_FALSE(contains(r, Vector{{0.05, 0.3}}));
  EXPECT_FALSE(contains(r, Vector{{0.6, 0.6}}));
}

TEST(RegionSpec, WholeSpaceAndInfiniteBounds) {
  EXPECT_TRUE(parse_region("whole(3)").is_whole_space());
  EXPECT_EQ(parse_region("whole()^4").dimension(), 4);
  const ConvexRegion r = parse_region("box(lower=[0, -inf], upper=[inf, 1])");
  EXPECT_TRUE(contains(r, Vector{{1e9, -1e9}}));
  EXPECT_FALSE(contains(r, Vector{{-1.0, 0.0}}));
}

TEST(RegionSpec, WhitespaceAndScientificNotation) {
  const ConvexRegion r = parse_region("  box ( lower = [ -1e-1 , -2.5E0 ] , upper = [ 1e0, +2 ] ) ");
  EXPECT_EQ(project(r, Vector{{-5.0, 5.0}}).point, (Vector{{-0.1, 2.0}}));
}

TEST(RegionSpec, DimensionIsEnforced) {
  EXPECT_NO_THROW(parse_region("box(-1,1)^2", 2));
  EXPECT_THROW(parse_region("box(-1,1)^2", 3), std::invalid_argument);
}

TEST(RegionSpec, ErrorsCarryOffsets) {
  for (const char* bad : {"", "box(", "box(-1,1)^0", "box(-1,1)^2.5", "cube(1)^2", "ball(1)",
                          "box(lower=[0,0], upper=[1])", "box(-1,1)^2 extra", "ball(center=[0,0], radius=x)",
                          "box(lower=[0,0], high=[1,1])", "intersect(box(0,1)^2, 3)"}) {
    EXPECT_THROW(parse_region(bad), std::invalid_argument) << bad;
  }
  try {
    parse_region("box(-1,1)^2 extra");
  } catch (const RegionSpecError& e) {
    EXPECT_EQ(e.offset(), 12u);
  }
}

TEST(RegionSpec, InvalidGeometryIsRejected) {
  EXPECT_THROW(parse_region("box(1,-1)^2"), std::invalid_argument);
  EXPECT_THROW(parse_region("ball(-1)^2"), std::invalid_argument);
  EXPECT_THROW(parse_region("intersect(box(0,1)^2, ball(1)^3)"), std::invalid_argument);
}

}  // namespace
