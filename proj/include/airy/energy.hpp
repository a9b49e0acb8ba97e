#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "airy/closedform.hpp"
#include "airy/core.hpp"
#include "airy/fields.hpp"

namespace airy {

struct EnergyBreakdown {
  double bulk_G = 0.0;
  double charge = 0.0;
  double total = 0.0;
  std::string region;
};

EnergyBreakdown make_breakdown(double bulk, double charge, std::string region);
std::string energy_report_json(const EnergyBreakdown& e, const Grid& grid);

// (1/2)(1+ν)/E ∫ (|∇²v|² - ν (Δv)²) over the field's region, by FD Hessians and cut-cell weights.
double airy_energy_G(const ScalarField& v, const ElasticConstants& c);
double airy_inner_product(const ScalarField& v, const ScalarField& w, const ElasticConstants& c);
// Same quadrature with the analytic Hessian at the nodes. Nodes of cut cells outside the region are
// evaluated too, so pass fields that extend smoothly across the boundary (CoreBranch::AnnulusExtension).
double airy_energy_G(const AiryFunction& v, const Grid& grid, const Region& region, const ElasticConstants& c);
double airy_inner_product(const AiryFunction& v, const AiryFunction& w, const Grid& grid, const Region& region,
                          const ElasticConstants& c);

// Symmetric tensor per node; components are NaN where the source field has no value.
struct TensorField {
  Grid grid;
  Region region;
  std::vector<Sym2> values;
};

TensorField stress_field(const HessianFields& hessian);
TensorField strain_field(const TensorField& stress, const ElasticConstants& c);
// (1/2)∫(λ(tr ε)² + 2μ|ε|²)
double strain_energy(const TensorField& strain, const ElasticConstants& c);
// (1/2)(1+ν)/E ∫(|σ|² - ν(tr σ)²)
double stress_energy(const TensorField& stress, const ElasticConstants& c);

// I(v) = G(v) + Σ s_k v(y_k), point values by bilinear interpolation.
EnergyBreakdown disclination_functional_I(const ScalarField& v, std::span<const Disclination> disclinations,
                                          const ElasticConstants& c);

// Max FD Hessian entry over nodes at least 4Δ inside the core, so stencils avoid the ghost band of solver
// fields. Throws ValidationError if the core holds no such node.
double core_hessian_max(const ScalarField& w, const Circle& core);
// Throws ValidationError unless core_hessian_max < tol for every core.
void certify_core_affine(const ScalarField& w, std::span<const Circle> cores, double tol = 1e-8);

// weight / (2π(ε-h)) ∮_{∂B_{ε-h}(center)} (w(x + (h/2) axis) - w(x - (h/2) axis)) / h
double dipole_circle_term(const std::function<double(Vec2)>& w, Vec2 center, Vec2 axis, double weight, double h, double eps,
                          int n_quad = 512);
// 1/(2πε) ∮_{∂B_ε(center)} ⟨∇w, direction⟩
double dislocation_circle_term(const std::function<Vec2(Vec2)>& gradient, Vec2 center, Vec2 direction, double eps,
                               int n_quad = 512);

// Dipole of charge s along e1 at the origin. G is taken over the field's region; w must be affine in B_ε.
EnergyBreakdown dipole_core_functional_J(const ScalarField& w, double s, double h, double eps, const ElasticConstants& c);
// Core-affine closed form: G on A_{ε,R} from the analytic Hessian of the annulus branch.
EnergyBreakdown dipole_core_functional_J(const AiryFunction& w, const AiryFunction& annulus_branch, const Grid& grid, double s,
                                         double h, double eps, double radius, const ElasticConstants& c);

EnergyBreakdown dislocation_core_functional_J0(const ScalarField& w, double s, double eps, const ElasticConstants& c);
EnergyBreakdown dislocation_core_functional_J0(const AiryFunction& w, const AiryFunction& annulus_branch, const Grid& grid,
                                               double s, double eps, double radius, const ElasticConstants& c);

// I_0(w) = G(w; Ω_ε(α)) + Σ_j (1/2πε)∮_{∂B_ε(x_j)} ⟨∇w, Π(b_j)⟩. The field region must be Ω_ε(α).
EnergyBreakdown system_functional_I0(const ScalarField& w, std::span<const Dislocation> dislocations, double eps,
                                     const ElasticConstants& c);
EnergyBreakdown system_functional_I0(const AiryFunction& w, const Grid& grid, const Region& region,
                                     std::span<const Dislocation> dislocations, double eps, const ElasticConstants& c);

// G(w; Ω) + Σ_j |b_j|/(2π(ε-h)) ∮ difference quotients along Π(b_j)/|b_j|.
EnergyBreakdown dipole_system_functional(const ScalarField& w, std::span<const DisclinationDipole> dipoles, double eps,
                                         const ElasticConstants& c);
EnergyBreakdown dipole_system_functional(const AiryFunction& w, const Grid& grid, const Region& region,
                                         std::span<const DisclinationDipole> dipoles, double eps, const ElasticConstants& c);

// (1+ν)/E ∮_C [-(1-ν) ∂_nΔW^j W^k + ⟨∇²W^j n, ∇W^k⟩ - ν ΔW^j ∂_n W^k] with n the outward normal of the
// region: away from the center when the region is inside C, toward it when C bounds a hole.
double boundary_pair_form(const AiryFunction& wj, const AiryFunction& wk, const Circle& circle, bool region_inside,
                          const ElasticConstants& c, int n_quad = 512);
// G(W; region) = (1/2) Σ over boundary components of the pair form B(W, W), for biharmonic W.
double boundary_energy(const AiryFunction& w, const Region& region, const ElasticConstants& c, int n_quad = 512);

}  // namespace airy
