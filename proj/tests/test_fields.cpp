#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "airy/fields.hpp"

using namespace airy;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Grid, CoveringCentersANode) {
  const Grid g = Grid::covering({{0.5, -0.25}, 1.0}, 64);
  EXPECT_DOUBLE_EQ(g.spacing(), 2.0 / 64);
  const auto [i, j] = g.cell_of({0.5, -0.25});
  EXPECT_NEAR(g.point(i, j).x, 0.5, 1e-14);
  EXPECT_NEAR(g.point(i, j).y, -0.25, 1e-14);
  EXPECT_THROW(Grid::covering({{0.0, 0.0}, 1.0}, 63), ValidationError);
  EXPECT_THROW(Grid::covering({{0.0, 0.0}, 1.0}, 64, 2), ValidationError);
}

TEST(CutCells, RectangleDiskAreaIsExact) {
  const Circle unit{{0.0, 0.0}, 1.0};
  EXPECT_NEAR(rectangle_disk_area({-2.0, -2.0}, {2.0, 2.0}, unit), kPi, 1e-14);
  EXPECT_NEAR(rectangle_disk_area({0.0, 0.0}, {2.0, 2.0}, unit), kPi / 4.0, 1e-14);
  // Unit square corner inside the disk: the whole square.
  EXPECT_NEAR(rectangle_disk_area({0.0, 0.0}, {0.5, 0.5}, unit), 0.25, 1e-15);
  // Segment above y = 0.5: r² acos(d/r) - d √(r² - d²).
  const double d = 0.5;
  EXPECT_NEAR(rectangle_disk_area({-2.0, 0.5}, {2.0, 2.0}, unit), std::acos(d) - d * std::sqrt(1.0 - d * d), 1e-14);
}

TEST(CutCells, WeightsSumToRegionArea) {
  const Region annulus({{0.0, 0.0}, 1.0}, {Circle{{0.1, 0.0}, 0.3}});
  const Grid g = Grid::covering(annulus.outer(), 40);
  const CellWeights w(g, annulus);
  double total = 0.0;
  for (double x : w.values()) total += x;
  EXPECT_NEAR(total, kPi * (1.0 - 0.09), 1e-12);
  EXPECT_NEAR(annulus.area(), kPi * 0.91, 1e-14);
  EXPECT_EQ(annulus.describe().rfind("punctured disk", 0), 0u);
  EXPECT_EQ(Region({{0.0, 0.0}, 1.0}).describe(), "disk R=1");
}

TEST(Region, InsideDistanceAndHoles) {
  const Region r({{0.0, 0.0}, 1.0}, {Circle{{0.5, 0.0}, 0.1}});
  EXPECT_NEAR(r.inside_distance({0.0, 0.0}), 0.4, 1e-15);
  EXPECT_NEAR(r.inside_distance({0.5, 0.05}), -0.05, 1e-15);
  EXPECT_EQ(r.hole_containing({0.5, 0.05}), 0);
  EXPECT_EQ(r.hole_containing({0.0, 0.0}), -1);
  EXPECT_THROW(Region({{0.0, 0.0}, 1.0}, {Circle{{0.95, 0.0}, 0.1}}), ValidationError);
}

TEST(Hessian, ExactOnQuadratics) {
  const Region disk({{0.0, 0.0}, 1.0});
  const Grid g = Grid::covering(disk.outer(), 32);
  const auto v = ScalarField::sample(g, disk, [](Vec2 p) { return 1.5 * p.x * p.x - 0.7 * p.x * p.y + 0.2 * p.y * p.y + p.x - 3.0; });
  const HessianFields h = hessian_fd(v);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!disk.contains(g.point(k))) continue;
    EXPECT_NEAR(h.xx.values()[k], 3.0, 1e-9);
    EXPECT_NEAR(h.xy.values()[k], -0.7, 1e-9);
    EXPECT_NEAR(h.yy.values()[k], 0.4, 1e-9);
  }
}

TEST(Hessian, StrictModeReportsMissingStencils) {
  const Region disk({{0.0, 0.0}, 1.0});
  const Grid g = Grid::covering(disk.outer(), 32);
  const auto v = ScalarField::sample(g, disk, [](Vec2 p) { return p.x; }, 0.0);
  EXPECT_THROW(hessian_fd(v, true), ValidationError);
  EXPECT_FALSE(hessian_fd(v, false).unresolved.empty());
}

TEST(Integrate, PolynomialOverDiskConvergesToSecondOrder) {
  const Region disk({{0.0, 0.0}, 1.0});
  double previous = 0.0;
  for (int n : {32, 64}) {
    const Grid g = Grid::covering(disk.outer(), n);
    const auto f = ScalarField::sample(g, disk, [](Vec2 p) { return norm2(p); });
    const double err = std::abs(integrate(f).value - kPi / 2.0);
    if (previous > 0.0) EXPECT_GT(std::log2(previous / err), 1.5);
    previous = err;
  }
}

TEST(Integrate, EmptyRegionIsFlagged) {
  const Region disk({{0.0, 0.0}, 1.0});
  const Grid g = Grid::covering(disk.outer(), 16);
  EXPECT_NEAR(integrate([](Vec2) { return 1.0; }, g, disk).value, kPi, 1e-12);
  EXPECT_FALSE(integrate([](Vec2) { return 1.0; }, g, disk).empty_region);
}

TEST(CircleQuadrature, TrapezoidIsSpectral) {
  const double v = circle_integral([](Vec2 p) { return p.x * p.x; }, {0.3, 0.0}, 0.5, 64);
  // ∮ (0.3 + 0.5 cos)² ds = 2π·0.5·(0.09 + 0.125)
  EXPECT_NEAR(v, 2.0 * kPi * 0.5 * (0.09 + 0.125), 1e-13);
  EXPECT_THROW(circle_integral([](Vec2) { return 1.0; }, {}, 1.0, 4), ValidationError);
}

TEST(Interpolation, BilinearAndBicubic) {
  const Region disk({{0.0, 0.0}, 1.0});
  const Grid g = Grid::covering(disk.outer(), 64);
  const auto lin = ScalarField::sample(g, disk, [](Vec2 p) { return 2.0 * p.x - p.y + 0.5; });
  EXPECT_NEAR(interpolate_bilinear(lin, {0.123, -0.321}), 2.0 * 0.123 + 0.321 + 0.5, 1e-13);
  const auto quad = ScalarField::sample(g, disk, [](Vec2 p) { return p.x * p.x + p.x * p.y; });
  const ValueGradient vg = interpolate_bicubic(quad, {0.2137, 0.1234});
  EXPECT_NEAR(vg.value, 0.2137 * 0.2137 + 0.2137 * 0.1234, 1e-12);
  EXPECT_NEAR(vg.gradient.x, 2.0 * 0.2137 + 0.1234, 1e-10);
  EXPECT_NEAR(vg.gradient.y, 0.2137, 1e-10);
}

TEST(FieldCsv, HeaderAndRows) {
  const Region disk({{0.0, 0.0}, 1.0});
  const Grid g = Grid::covering(disk.outer(), 8);
  const auto v = ScalarField::sample(g, disk, [](Vec2 p) { return p.x; });
  std::ostringstream out;
  write_field_csv(out, v, hessian_fd(v, false));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "x,y,v,v_xx,v_xy,v_yy,mask");
}
