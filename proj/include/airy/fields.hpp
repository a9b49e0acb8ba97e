#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "airy/core.hpp"

namespace airy {

// Uniform Cartesian grid; node (i, j) sits at origin + spacing * (i, j).
class Grid {
 public:
  Grid(Vec2 origin, double spacing, int nx, int ny);
  // Spacing 2R/n with the disk center on a node and `pad` extra nodes beyond the disk on every side.
  static Grid covering(const Circle& disk, int n, int pad = 4);

  Vec2 origin() const { return origin_; }
  double spacing() const { return spacing_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i); }
  int column(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(nx_)); }
  int row(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(nx_)); }
  Vec2 point(int i, int j) const { return {origin_.x + spacing_ * i, origin_.y + spacing_ * j}; }
  Vec2 point(std::size_t k) const { return point(column(k), row(k)); }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
  // Lower-left node of the cell containing p, clamped into the grid.
  std::pair<int, int> cell_of(Vec2 p) const;

 private:
  Vec2 origin_;
  double spacing_;
  int nx_;
  int ny_;
};

// Area of the axis-aligned rectangle [x0,x1]x[y0,y1] intersected with a disk, exact.
double rectangle_disk_area(Vec2 lo, Vec2 hi, const Circle& disk);

// A disk with disjoint circular holes: the disk, the annulus, the punctured disk.
class Region {
 public:
  explicit Region(Circle outer, std::vector<Circle> holes = {});
  static Region from_domain(const DiskDomain& domain) { return Region(domain.disk, domain.cores); }

  const Circle& outer() const { return outer_; }
  std::span<const Circle> holes() const { return holes_; }

  // Distance to the nearest boundary component, positive inside the region.
  double inside_distance(Vec2 p) const;
  // -1 for the outer circle, j for hole j.
  int nearest_component(Vec2 p) const;
  bool contains(Vec2 p) const { return inside_distance(p) > 0.0; }
  // Index of the hole containing p, or -1.
  int hole_containing(Vec2 p) const;
  double area() const;
  double cell_area(Vec2 lo, Vec2 hi) const;
  std::string describe() const;

 private:
  Circle outer_;
  std::vector<Circle> holes_;
};

enum class NodeKind : std::uint8_t { Outside = 0, Inside = 1, Core = 2 };

// Nodal areas |dual cell ∩ region|; the dual cell of node k is the square of side Δ centred on it.
class CellWeights {
 public:
  CellWeights(const Grid& grid, const Region& region);
  std::span<const double> values() const { return weights_; }
  double operator[](std::size_t k) const { return weights_[k]; }
  // Nodes with positive weight, in increasing index order.
  std::span<const std::size_t> support() const { return support_; }

 private:
  std::vector<double> weights_;
  std::vector<std::size_t> support_;
};

// Nodal samples with a mask; NaN marks nodes that carry no value.
class ScalarField {
 public:
  ScalarField(Grid grid, Region region);
  // Samples fn at every node within `band` spacings outside the region (and inside it).
  static ScalarField sample(const Grid& grid, const Region& region, const std::function<double(Vec2)>& fn,
                            double band = 2.5);

  const Grid& grid() const { return grid_; }
  const Region& region() const { return region_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const NodeKind> mask() const { return mask_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  bool has_value(int i, int j) const;

 private:
  Grid grid_;
  Region region_;
  std::vector<double> values_;
  std::vector<NodeKind> mask_;
};

struct GridNode {
  int i = 0;
  int j = 0;
};

struct HessianFields {
  ScalarField xx;
  ScalarField xy;
  ScalarField yy;
  // Quadrature nodes (positive cell weight) whose 3x3 stencil has a missing value.
  std::vector<GridNode> unresolved;
};

// Second-order central differences. strict = true throws ValidationError listing unresolved nodes.
HessianFields hessian_fd(const ScalarField& v, bool strict = true);

struct Integral {
  double value = 0.0;
  bool empty_region = false;
};

// Cut-cell quadrature over the field's region: sum of nodal value times |dual cell ∩ region|.
Integral integrate(const ScalarField& f);
Integral integrate(const ScalarField& f, const CellWeights& weights);
// Same rule for a pointwise function.
Integral integrate(const std::function<double(Vec2)>& f, const Grid& grid, const Region& region);

// Trapezoidal rule on n equispaced angles; exact for trigonometric polynomials of degree < n.
double circle_integral(const std::function<double(Vec2)>& g, Vec2 center, double radius, int n_quad);

// Bilinear interpolation; throws ValidationError if a corner carries no value.
double interpolate_bilinear(const ScalarField& v, Vec2 p);

struct ValueGradient {
  double value = 0.0;
  Vec2 gradient;
};

// Keys cubic-convolution interpolation (a = -1/2), C1 and third-order accurate.
ValueGradient interpolate_bicubic(const ScalarField& v, Vec2 p);

// Header x,y,v,v_xx,v_xy,v_yy,mask; row-major over nodes with a value.
void write_field_csv(std::ostream& out, const ScalarField& v, const HessianFields& hessian);

}  // namespace airy
