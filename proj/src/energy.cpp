#include "airy/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "airy/json_writer.hpp"

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;

double density(const Sym2& h, const ElasticConstants& c) {
  const double tr = h.trace();
  return 0.5 * c.compliance() * (h.norm2() - c.poisson() * tr * tr);
}

double bilinear_density(const Sym2& a, const Sym2& b, const ElasticConstants& c) {
  return 0.5 * c.compliance() * (contract(a, b) - c.poisson() * a.trace() * b.trace());
}

Sym2 hessian_at(const HessianFields& h, std::size_t k) { return {h.xx.values()[k], h.xy.values()[k], h.yy.values()[k]}; }

double weighted_sum(const CellWeights& weights, const std::function<double(std::size_t)>& term) {
  const auto support = weights.support();
  std::vector<double> terms(support.size());
  for (std::size_t n = 0; n < support.size(); ++n) terms[n] = weights[support[n]] * term(support[n]);
  return pairwise_sum(terms);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite value (unresolved singularity in the region?)");
}

}  // namespace

EnergyBreakdown make_breakdown(double bulk, double charge, std::string region) {
  return {bulk, charge, bulk + charge, std::move(region)};
}

std::string energy_report_json(const EnergyBreakdown& e, const Grid& grid) {
  JsonWriter w;
  w.begin_object();
  w.key("bulk_G").value(e.bulk_G);
  w.key("charge").value(e.charge);
  w.key("total").value(e.total);
  w.key("region").value(e.region);
  w.key("grid").begin_object().key("delta").value(grid.spacing()).key("n").value(grid.nx()).end_object();
  w.end_object();
  return w.str();
}

double airy_energy_G(const ScalarField& v, const ElasticConstants& c) {
  const HessianFields h = hessian_fd(v, true);
  const CellWeights weights(v.grid(), v.region());
  const double g = weighted_sum(weights, [&](std::size_t k) { return density(hessian_at(h, k), c); });
  require_finite(g, "airy_energy_G");
  return g;
}

double airy_inner_product(const ScalarField& v, const ScalarField& w, const ElasticConstants& c) {
  if (v.grid().size() != w.grid().size() || v.grid().spacing() != w.grid().spacing())
    throw ValidationError("airy_inner_product: fields live on different grids");
  const HessianFields hv = hessian_fd(v, true);
  const HessianFields hw = hessian_fd(w, true);
  const CellWeights weights(v.grid(), v.region());
  const double g = weighted_sum(weights, [&](std::size_t k) { return bilinear_density(hessian_at(hv, k), hessian_at(hw, k), c); });
  require_finite(g, "airy_inner_product");
  return g;
}

double airy_energy_G(const AiryFunction& v, const Grid& grid, const Region& region, const ElasticConstants& c) {
  const double g = integrate([&](Vec2 p) { return density(v.hessian(p), c); }, grid, region).value;
  require_finite(g, "airy_energy_G");
  return g;
}

double airy_inner_product(const AiryFunction& v, const AiryFunction& w, const Grid& grid, const Region& region,
                          const ElasticConstants& c) {
  const double g = integrate([&](Vec2 p) { return bilinear_density(v.hessian(p), w.hessian(p), c); }, grid, region).value;
  require_finite(g, "airy_inner_product");
  return g;
}

TensorField stress_field(const HessianFields& h) {
  TensorField t{h.xx.grid(), h.xx.region(), std::vector<Sym2>(h.xx.grid().size())};
  for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] = airy_to_stress(hessian_at(h, k));
  return t;
}

TensorField strain_field(const TensorField& stress, const ElasticConstants& c) {
  TensorField t{stress.grid, stress.region, std::vector<Sym2>(stress.values.size())};
  for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] = stress_to_strain(stress.values[k], c);
  return t;
}

double strain_energy(const TensorField& strain, const ElasticConstants& c) {
  const CellWeights weights(strain.grid, strain.region);
  const double e = weighted_sum(weights, [&](std::size_t k) { return strain_energy_density(strain.values[k], c); });
  require_finite(e, "strain_energy");
  return e;
}

double stress_energy(const TensorField& stress, const ElasticConstants& c) {
  const CellWeights weights(stress.grid, stress.region);
  const double e = weighted_sum(weights, [&](std::size_t k) { return stress_energy_density(stress.values[k], c); });
  require_finite(e, "stress_energy");
  return e;
}

EnergyBreakdown disclination_functional_I(const ScalarField& v, std::span<const Disclination> disclinations,
                                          const ElasticConstants& c) {
  double charge = 0.0;
  for (const auto& d : disclinations) {
    if (v.region().hole_containing(d.site) >= 0) throw ValidationError("disclination_functional_I: site lies in a hole");
    charge += d.frank_angle * interpolate_bilinear(v, d.site);
  }
  return make_breakdown(airy_energy_G(v, c), charge, v.region().describe());
}

double core_hessian_max(const ScalarField& w, const Circle& core) {
  const Grid& g = w.grid();
  const double limit = core.radius - 4.0 * g.spacing();
  if (limit < 0.0) throw ValidationError("core_hessian_max: core radius below 4 grid spacings");
  double worst = -1.0;
  const auto [i0, j0] = g.cell_of(core.center);
  const int reach = static_cast<int>(std::ceil(core.radius / g.spacing())) + 1;
  for (int j = j0 - reach; j <= j0 + reach + 1; ++j) {
    for (int i = i0 - reach; i <= i0 + reach + 1; ++i) {
      if (!g.contains(i - 1, j - 1) || !g.contains(i + 1, j + 1)) continue;
      if (norm(g.point(i, j) - core.center) > limit) continue;
      const double inv = 1.0 / (g.spacing() * g.spacing());
      const double c0 = w(i, j);
      const double xx = (w(i + 1, j) - 2.0 * c0 + w(i - 1, j)) * inv;
      const double yy = (w(i, j + 1) - 2.0 * c0 + w(i, j - 1)) * inv;
      const double xy = 0.25 * (w(i + 1, j + 1) - w(i + 1, j - 1) - w(i - 1, j + 1) + w(i - 1, j - 1)) * inv;
      const double m = std::max({std::abs(xx), std::abs(xy), std::abs(yy)});
      if (!std::isfinite(m)) throw ValidationError("core_hessian_max: core node without a value");
      worst = std::max(worst, m);
    }
  }
  if (worst < 0.0) throw ValidationError("core_hessian_max: no grid node resolves the core");
  return worst;
}

void certify_core_affine(const ScalarField& w, std::span<const Circle> cores, double tol) {
  for (std::size_t j = 0; j < cores.size(); ++j) {
    const double m = core_hessian_max(w, cores[j]);
    if (!(m < tol))
      throw ValidationError("field is not affine in core " + std::to_string(j) + ": max FD Hessian " + format_double(m));
  }
}

double dipole_circle_term(const std::function<double(Vec2)>& w, Vec2 center, Vec2 axis, double weight, double h, double eps,
                          int n_quad) {
  if (!(h > 0.0) || !(h < eps)) throw ValidationError("dipole term: 0 < h < eps violated");
  const Vec2 shift = 0.5 * h * axis;
  const double rho = eps - h;
  const double integral = circle_integral([&](Vec2 x) { return (w(x + shift) - w(x - shift)) / h; }, center, rho, n_quad);
  return weight * integral / (2.0 * kPi * rho);
}

double dislocation_circle_term(const std::function<Vec2(Vec2)>& gradient, Vec2 center, Vec2 direction, double eps, int n_quad) {
  if (!(eps > 0.0)) throw ValidationError("dislocation term: eps must be positive");
  const double integral = circle_integral([&](Vec2 x) { return dot(gradient(x), direction); }, center, eps, n_quad);
  return integral / (2.0 * kPi * eps);
}

namespace {

std::function<double(Vec2)> interpolated_value(const ScalarField& w) {
  return [&w](Vec2 p) { return interpolate_bicubic(w, p).value; };
}

std::function<Vec2(Vec2)> interpolated_gradient(const ScalarField& w) {
  return [&w](Vec2 p) { return interpolate_bicubic(w, p).gradient; };
}

void require_resolved_core(const Grid& grid, double eps) {
  if (eps < 4.0 * grid.spacing()) throw ValidationError("core radius must be at least 4 grid spacings");
}

void check_separation(std::span<const Vec2> sites, const Circle& outer, double eps) {
  if (sites.empty()) return;
  if (!(eps < min_separation(sites, outer))) throw ValidationError("core radius must be smaller than the separation D");
}

std::vector<Circle> cores_at(std::span<const Vec2> sites, double eps) {
  std::vector<Circle> out;
  for (Vec2 s : sites) out.push_back({s, eps});
  return out;
}

}  // namespace

EnergyBreakdown dipole_core_functional_J(const ScalarField& w, double s, double h, double eps, const ElasticConstants& c) {
  if (!(h > 0.0) || !(h < eps)) throw ValidationError("dipole_core_functional_J: 0 < h < eps violated");
  require_resolved_core(w.grid(), eps);
  const Circle core{{0.0, 0.0}, eps};
  certify_core_affine(w, std::span<const Circle>(&core, 1));
  const double charge = dipole_circle_term(interpolated_value(w), core.center, {1.0, 0.0}, s, h, eps);
  return make_breakdown(airy_energy_G(w, c), charge, w.region().describe());
}

EnergyBreakdown dipole_core_functional_J(const AiryFunction& w, const AiryFunction& annulus_branch, const Grid& grid, double s,
                                         double h, double eps, double radius, const ElasticConstants& c) {
  if (!(h > 0.0) || !(h < eps)) throw ValidationError("dipole_core_functional_J: 0 < h < eps violated");
  const Region annulus({{0.0, 0.0}, radius}, {{{0.0, 0.0}, eps}});
  const double charge = dipole_circle_term([&](Vec2 p) { return w.value(p); }, {0.0, 0.0}, {1.0, 0.0}, s, h, eps);
  return make_breakdown(airy_energy_G(annulus_branch, grid, annulus, c), charge, annulus.describe());
}

EnergyBreakdown dislocation_core_functional_J0(const ScalarField& w, double s, double eps, const ElasticConstants& c) {
  const Dislocation d{{0.0, 0.0}, {0.0, s}};
  return system_functional_I0(w, std::span<const Dislocation>(&d, 1), eps, c);
}

EnergyBreakdown dislocation_core_functional_J0(const AiryFunction& w, const AiryFunction& annulus_branch, const Grid& grid,
                                               double s, double eps, double radius, const ElasticConstants& c) {
  const Region annulus({{0.0, 0.0}, radius}, {{{0.0, 0.0}, eps}});
  const double charge = s * dislocation_circle_term([&](Vec2 p) { return w.gradient(p); }, {0.0, 0.0}, {1.0, 0.0}, eps);
  return make_breakdown(airy_energy_G(annulus_branch, grid, annulus, c), charge, annulus.describe());
}

EnergyBreakdown system_functional_I0(const ScalarField& w, std::span<const Dislocation> dislocations, double eps,
                                     const ElasticConstants& c) {
  require_resolved_core(w.grid(), eps);
  const auto sites = dislocation_sites(dislocations);
  check_separation(sites, w.region().outer(), eps);
  const auto cores = cores_at(sites, eps);
  certify_core_affine(w, cores);
  double charge = 0.0;
  for (const auto& d : dislocations)
    charge += dislocation_circle_term(interpolated_gradient(w), d.site, rotate_burgers(d.burgers), eps);
  return make_breakdown(airy_energy_G(w, c), charge, w.region().describe());
}

EnergyBreakdown system_functional_I0(const AiryFunction& w, const Grid& grid, const Region& region,
                                     std::span<const Dislocation> dislocations, double eps, const ElasticConstants& c) {
  const auto sites = dislocation_sites(dislocations);
  check_separation(sites, region.outer(), eps);
  double charge = 0.0;
  for (const auto& d : dislocations)
    charge += dislocation_circle_term([&](Vec2 p) { return w.gradient(p); }, d.site, rotate_burgers(d.burgers), eps);
  return make_breakdown(airy_energy_G(w, grid, region, c), charge, region.describe());
}

namespace {

std::vector<Vec2> dipole_centers(std::span<const DisclinationDipole> dipoles) {
  std::vector<Vec2> out;
  for (const auto& d : dipoles) out.push_back(d.center);
  return out;
}

double dipole_charge(const std::function<double(Vec2)>& w, std::span<const DisclinationDipole> dipoles, double eps) {
  double charge = 0.0;
  for (const auto& d : dipoles) charge += dipole_circle_term(w, d.center, d.axis(), d.charge(), d.spacing, eps);
  return charge;
}

}  // namespace

EnergyBreakdown dipole_system_functional(const ScalarField& w, std::span<const DisclinationDipole> dipoles, double eps,
                                         const ElasticConstants& c) {
  require_resolved_core(w.grid(), eps);
  const auto centers = dipole_centers(dipoles);
  check_separation(centers, w.region().outer(), eps);
  certify_core_affine(w, cores_at(centers, eps));
  return make_breakdown(airy_energy_G(w, c), dipole_charge(interpolated_value(w), dipoles, eps), w.region().describe());
}

EnergyBreakdown dipole_system_functional(const AiryFunction& w, const Grid& grid, const Region& region,
                                         std::span<const DisclinationDipole> dipoles, double eps, const ElasticConstants& c) {
  check_separation(dipole_centers(dipoles), region.outer(), eps);
  const double charge = dipole_charge([&](Vec2 p) { return w.value(p); }, dipoles, eps);
  return make_breakdown(airy_energy_G(w, grid, region, c), charge, region.describe());
}

double boundary_pair_form(const AiryFunction& wj, const AiryFunction& wk, const Circle& circle, bool region_inside,
                          const ElasticConstants& c, int n_quad) {
  const double sign = region_inside ? 1.0 : -1.0;
  const double nu = c.poisson();
  const double integral = circle_integral(
      [&](Vec2 x) {
        const Vec2 n = sign * (x - circle.center) / circle.radius;
        const AiryDerivatives j = wj.derivatives(x);
        const AiryDerivatives k = wk.derivatives(x);
        return -(1.0 - nu) * dot(j.laplacian_gradient(), n) * k.value + dot(j.hessian.apply(n), k.gradient) -
               nu * j.laplacian() * dot(k.gradient, n);
      },
      circle.center, circle.radius, n_quad);
  return c.compliance() * integral;
}

double boundary_energy(const AiryFunction& w, const Region& region, const ElasticConstants& c, int n_quad) {
  double total = 0.5 * boundary_pair_form(w, w, region.outer(), true, c, n_quad);
  for (const auto& h : region.holes()) total += 0.5 * boundary_pair_form(w, w, h, false, c, n_quad);
  return total;
}

}  // namespace airy
