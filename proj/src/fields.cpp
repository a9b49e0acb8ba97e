#include "airy/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "airy/json_writer.hpp"

namespace airy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Grid::Grid(Vec2 origin, double spacing, int nx, int ny) : origin_(origin), spacing_(spacing), nx_(nx), ny_(ny) {
  if (!(spacing > 0.0) || nx < 1 || ny < 1) throw ValidationError("grid: spacing and sizes must be positive");
}

Grid Grid::covering(const Circle& disk, int n, int pad) {
  if (n < 4 || n % 2 != 0) throw ValidationError("grid: n must be an even integer >= 4");
  if (pad < 3) throw ValidationError("grid: padding must be at least 3 nodes");
  const double h = 2.0 * disk.radius / n;
  const int m = n / 2 + pad;
  return Grid({disk.center.x - m * h, disk.center.y - m * h}, h, 2 * m + 1, 2 * m + 1);
}

std::pair<int, int> Grid::cell_of(Vec2 p) const {
  const int i = static_cast<int>(std::floor((p.x - origin_.x) / spacing_));
  const int j = static_cast<int>(std::floor((p.y - origin_.y) / spacing_));
  return {std::clamp(i, 0, nx_ - 2), std::clamp(j, 0, ny_ - 2)};
}

namespace {

// Antiderivative of sqrt(r^2 - u^2), with u clamped to [-r, r].
double chord_primitive(double u, double r) {
  u = std::clamp(u, -r, r);
  return 0.5 * (u * std::sqrt(std::max(r * r - u * u, 0.0)) + r * r * std::asin(u / r));
}

}  // namespace

double rectangle_disk_area(Vec2 lo, Vec2 hi, const Circle& disk) {
  const double r = disk.radius;
  const double x0 = lo.x - disk.center.x, x1 = hi.x - disk.center.x;
  const double y0 = lo.y - disk.center.y, y1 = hi.y - disk.center.y;
  const double a = std::max(x0, -r), b = std::min(x1, r);
  if (a >= b || y0 >= r || y1 <= -r) return 0.0;
  // Between breakpoints the clipped chord [max(y0,-c), min(y1,c)] keeps its branch structure.
  std::array<double, 6> cuts{a, b, 0, 0, 0, 0};
  std::size_t nc = 2;
  for (double y : {y0, y1}) {
    if (std::abs(y) < r) {
      const double u = std::sqrt(r * r - y * y);
      for (double v : {-u, u}) {
        if (v > a && v < b) cuts[nc++] = v;
      }
    }
  }
  std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(nc));
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nc; ++k) {
    const double p = cuts[k], q = cuts[k + 1];
    if (q <= p) continue;
    const double m = 0.5 * (p + q);
    const double c = std::sqrt(std::max(r * r - m * m, 0.0));
    if (y1 <= -c || y0 >= c) continue;
    const double arc = chord_primitive(q, r) - chord_primitive(p, r);
    const double top = (y1 > c) ? arc : y1 * (q - p);
    const double bottom = (y0 < -c) ? -arc : y0 * (q - p);
    total += top - bottom;
  }
  return total;
}

Region::Region(Circle outer, std::vector<Circle> holes) : outer_(outer), holes_(std::move(holes)) {
  if (!(outer_.radius > 0.0)) throw ValidationError("region: outer radius must be positive");
  DiskDomain{outer_, holes_}.validate();
}

double Region::inside_distance(Vec2 p) const {
  double d = outer_.radius - norm(p - outer_.center);
  for (const auto& h : holes_) d = std::min(d, norm(p - h.center) - h.radius);
  return d;
}

int Region::nearest_component(Vec2 p) const {
  double d = outer_.radius - norm(p - outer_.center);
  int comp = -1;
  for (std::size_t j = 0; j < holes_.size(); ++j) {
    const double dj = norm(p - holes_[j].center) - holes_[j].radius;
    if (dj < d) {
      d = dj;
      comp = static_cast<int>(j);
    }
  }
  return comp;
}

int Region::hole_containing(Vec2 p) const {
  for (std::size_t j = 0; j < holes_.size(); ++j) {
    if (norm(p - holes_[j].center) < holes_[j].radius) return static_cast<int>(j);
  }
  return -1;
}

double Region::area() const {
  double a = std::numbers::pi * outer_.radius * outer_.radius;
  for (const auto& h : holes_) a -= std::numbers::pi * h.radius * h.radius;
  return a;
}

double Region::cell_area(Vec2 lo, Vec2 hi) const {
  double a = rectangle_disk_area(lo, hi, outer_);
  for (const auto& h : holes_) a -= rectangle_disk_area(lo, hi, h);
  return std::max(a, 0.0);
}

std::string Region::describe() const {
  std::ostringstream s;
  s << (holes_.empty() ? "disk" : (holes_.size() == 1 && holes_[0].center == outer_.center ? "annulus" : "punctured disk"));
  s << " R=" << format_double(outer_.radius);
  for (const auto& h : holes_) s << " hole(" << format_double(h.center.x) << "," << format_double(h.center.y) << ";" << format_double(h.radius) << ")";
  return s.str();
}

CellWeights::CellWeights(const Grid& grid, const Region& region) : weights_(grid.size(), 0.0) {
  const double h = grid.spacing();
  const double full = h * h;
  // A dual cell is entirely inside once the node is farther than half its diagonal from the boundary.
  const double inner = std::sqrt(0.5) * h * (1.0 + 1e-12);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 p = grid.point(k);
    const double d = region.inside_distance(p);
    if (d >= inner) {
      weights_[k] = full;
    } else if (d > -inner) {
      weights_[k] = region.cell_area({p.x - 0.5 * h, p.y - 0.5 * h}, {p.x + 0.5 * h, p.y + 0.5 * h});
    }
    if (weights_[k] > 0.0) support_.push_back(k);
  }
}

ScalarField::ScalarField(Grid grid, Region region)
    : grid_(std::move(grid)), region_(std::move(region)), values_(grid_.size(), kNaN), mask_(grid_.size(), NodeKind::Outside) {
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const Vec2 p = grid_.point(k);
    if (region_.contains(p)) {
      mask_[k] = NodeKind::Inside;
    } else if (region_.hole_containing(p) >= 0) {
      mask_[k] = NodeKind::Core;
    }
  }
}

ScalarField ScalarField::sample(const Grid& grid, const Region& region, const std::function<double(Vec2)>& fn, double band) {
  ScalarField f(grid, region);
  const double cutoff = -band * grid.spacing();
  parallel_for(grid.size(), [&](std::size_t k) {
    const Vec2 p = grid.point(k);
    if (region.inside_distance(p) > cutoff) f.values_[k] = fn(p);
  });
  return f;
}

bool ScalarField::has_value(int i, int j) const { return grid_.contains(i, j) && std::isfinite(values_[grid_.index(i, j)]); }

HessianFields hessian_fd(const ScalarField& v, bool strict) {
  const Grid& g = v.grid();
  HessianFields out{ScalarField(g, v.region()), ScalarField(g, v.region()), ScalarField(g, v.region()), {}};
  const double inv = 1.0 / (g.spacing() * g.spacing());
  const CellWeights weights(g, v.region());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      bool complete = true;
      for (int dj = -1; dj <= 1 && complete; ++dj)
        for (int di = -1; di <= 1 && complete; ++di) complete = v.has_value(i + di, j + dj);
      const std::size_t k = g.index(i, j);
      if (!complete) {
        if (weights[k] > 0.0) out.unresolved.push_back({i, j});
        continue;
      }
      const double c = v(i, j);
      out.xx(i, j) = (v(i + 1, j) - 2.0 * c + v(i - 1, j)) * inv;
      out.yy(i, j) = (v(i, j + 1) - 2.0 * c + v(i, j - 1)) * inv;
      out.xy(i, j) = 0.25 * (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1)) * inv;
    }
  }
  if (strict && !out.unresolved.empty()) {
    std::ostringstream msg;
    msg << "hessian_fd: grid too coarse, " << out.unresolved.size() << " quadrature nodes lack a full stencil:";
    const std::size_t shown = std::min<std::size_t>(out.unresolved.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) msg << " (" << out.unresolved[k].i << "," << out.unresolved[k].j << ")";
    if (shown < out.unresolved.size()) msg << " ...";
    throw ValidationError(msg.str());
  }
  return out;
}

Integral integrate(const ScalarField& f, const CellWeights& weights) {
  const auto support = weights.support();
  if (support.empty()) return {0.0, true};
  std::vector<double> terms(support.size());
  const auto values = f.values();
  for (std::size_t n = 0; n < support.size(); ++n) {
    const double v = values[support[n]];
    if (!std::isfinite(v)) {
      const Grid& g = f.grid();
      throw NumericalError("integrate: no finite value at quadrature node (" + std::to_string(g.column(support[n])) + "," +
                           std::to_string(g.row(support[n])) + ")");
    }
    terms[n] = weights[support[n]] * v;
  }
  return {pairwise_sum(terms), false};
}

Integral integrate(const ScalarField& f) { return integrate(f, CellWeights(f.grid(), f.region())); }

Integral integrate(const std::function<double(Vec2)>& f, const Grid& grid, const Region& region) {
  const CellWeights weights(grid, region);
  const auto support = weights.support();
  if (support.empty()) return {0.0, true};
  std::vector<double> terms(support.size());
  parallel_for(support.size(), [&](std::size_t n) { terms[n] = weights[support[n]] * f(grid.point(support[n])); });
  return {pairwise_sum(terms), false};
}

double circle_integral(const std::function<double(Vec2)>& g, Vec2 center, double radius, int n_quad) {
  if (!(radius > 0.0)) throw ValidationError("circle_integral: radius must be positive");
  if (n_quad < 8) throw ValidationError("circle_integral: n_quad must be at least 8");
  std::vector<double> terms(static_cast<std::size_t>(n_quad));
  for (int k = 0; k < n_quad; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n_quad;
    terms[static_cast<std::size_t>(k)] = g({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return pairwise_sum(terms) * 2.0 * std::numbers::pi * radius / n_quad;
}

double interpolate_bilinear(const ScalarField& v, Vec2 p) {
  const Grid& g = v.grid();
  const auto [i, j] = g.cell_of(p);
  const Vec2 base = g.point(i, j);
  const double tx = (p.x - base.x) / g.spacing();
  const double ty = (p.y - base.y) / g.spacing();
  if (tx < -1e-12 || ty < -1e-12 || tx > 1.0 + 1e-12 || ty > 1.0 + 1e-12)
    throw ValidationError("interpolate_bilinear: point outside the grid");
  if (!v.has_value(i, j) || !v.has_value(i + 1, j) || !v.has_value(i, j + 1) || !v.has_value(i + 1, j + 1))
    throw ValidationError("interpolate_bilinear: point lies under a masked node");
  return (1 - tx) * (1 - ty) * v(i, j) + tx * (1 - ty) * v(i + 1, j) + (1 - tx) * ty * v(i, j + 1) + tx * ty * v(i + 1, j + 1);
}

namespace {

// Keys kernel weights and their derivatives for offsets -1, 0, 1, 2 at fractional position t.
void keys_weights(double t, std::array<double, 4>& w, std::array<double, 4>& dw) {
  const double t2 = t * t, t3 = t2 * t;
  w = {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t, 0.5 * t3 - 0.5 * t2};
  dw = {-1.5 * t2 + 2.0 * t - 0.5, 4.5 * t2 - 5.0 * t, -4.5 * t2 + 4.0 * t + 0.5, 1.5 * t2 - t};
}

}  // namespace

ValueGradient interpolate_bicubic(const ScalarField& v, Vec2 p) {
  const Grid& g = v.grid();
  const auto [i, j] = g.cell_of(p);
  const Vec2 base = g.point(i, j);
  const double h = g.spacing();
  std::array<double, 4> wx, dwx, wy, dwy;
  keys_weights((p.x - base.x) / h, wx, dwx);
  keys_weights((p.y - base.y) / h, wy, dwy);
  ValueGradient out;
  for (int b = 0; b < 4; ++b) {
    for (int a = 0; a < 4; ++a) {
      const int ii = i - 1 + a, jj = j - 1 + b;
      if (!v.has_value(ii, jj)) throw ValidationError("interpolate_bicubic: stencil touches a masked node");
      const double f = v(ii, jj);
      out.value += wx[a] * wy[b] * f;
      out.gradient.x += dwx[a] * wy[b] * f / h;
      out.gradient.y += wx[a] * dwy[b] * f / h;
    }
  }
  return out;
}

void write_field_csv(std::ostream& out, const ScalarField& v, const HessianFields& hessian) {
  out << "x,y,v,v_xx,v_xy,v_yy,mask\n";
  const Grid& g = v.grid();
  const auto mask = v.mask();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!std::isfinite(v.values()[k])) continue;
    const Vec2 p = g.point(k);
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(v.values()[k]) << ','
        << format_double(hessian.xx.values()[k]) << ',' << format_double(hessian.xy.values()[k]) << ','
        << format_double(hessian.yy.values()[k]) << ',' << static_cast<int>(mask[k]) << '\n';
  }
}

}  // namespace airy
