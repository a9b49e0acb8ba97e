#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "airy/core.hpp"


namespace airy {

class Grid;
class Region;
class Jet3;

// Symmetric 2x2 tensor stored by its three independent components.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
  // Frobenius norm squared, counting the off-diagonal entry twice.
  double norm2() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  friend Sym2 operator+(Sym2 a, Sym2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
  friend Sym2 operator*(double s, Sym2 a) { return {s * a.xx, s * a.xy, s * a.yy}; }
};

inline double contract(const Sym2& a, const Sym2& b) { return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy; }

// Value and derivatives up to third order at one point.
struct AiryDerivatives {
  double value = 0.0;
  Vec2 gradient;
  Sym2 hessian;
  std::array<double, 4> third{};  // xxx, xxy, xyy, yyy

  double laplacian() const { return hessian.trace(); }
  Vec2 laplacian_gradient() const { return {third[0] + third[2], third[1] + third[3]}; }
  AiryDerivatives& operator+=(const AiryDerivatives& o);
  AiryDerivatives& operator*=(double s);
};

AiryDerivatives derivatives_from(const Jet3& jet);

// E/(1-nu^2) |x|^2 log|x|^2 / (16 pi), zero at the origin. Solves (1-nu^2)/E Δ² v = δ_0.
double fundamental_airy(Vec2 x, const ElasticConstants& c);
AiryDerivatives fundamental_airy_derivatives(Vec2 x, const ElasticConstants& c);

// Clamped single disclination of angle s at `site` in B_R(site). Throws outside the ball.
double single_disclination_clamped(Vec2 x, double s, Vec2 site, double radius, const ElasticConstants& c);
AiryDerivatives single_disclination_clamped_derivatives(Vec2 x, double s, Vec2 site, double radius, const ElasticConstants& c);

// -s (v̄(x - y+) - v̄(x - y-)) with y± = ±(h/2, 0).
double dipole_airy(Vec2 x, double s, double h, const ElasticConstants& c);
// Same potential for a dipole with arbitrary center and axis; weight |b|.
double dipole_airy(Vec2 x, const DisclinationDipole& dipole, const ElasticConstants& c);
AiryDerivatives dipole_airy_derivatives(Vec2 x, const DisclinationDipole& dipole, const ElasticConstants& c);

// h -> 0 limit of dipole_airy / h: E/(1-nu^2) s/(8 pi) (x1 log|x|^2 + x1). Throws at x = 0.
AiryDerivatives dipole_derivative_airy(Vec2 x, double s, const ElasticConstants& c);

struct CoreCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};
CoreCoefficients core_coefficients(double eps, double radius);

enum class CoreBranch {
  Physical,           // affine continuation inside the core ball
  AnnulusExtension,   // annulus formula continued into the core (smooth away from the site)
};

// Minimizer of the core-regularized dislocation problem on B_R(site) in the frame (Π(b)/|b|, b/|b|).
double dislocation_core_airy(Vec2 x, Vec2 b, Vec2 site, double eps, double radius, const ElasticConstants& c,
                             CoreBranch branch = CoreBranch::Physical);
AiryDerivatives dislocation_core_derivatives(Vec2 x, Vec2 b, Vec2 site, double eps, double radius, const ElasticConstants& c,
                                             CoreBranch branch = CoreBranch::Physical);

// ε -> 0 limit field W_0 on B_R(site). Throws at x = site.
double dislocation_limit_airy(Vec2 x, Vec2 b, Vec2 site, double radius, const ElasticConstants& c);
AiryDerivatives dislocation_limit_derivatives(Vec2 x, Vec2 b, Vec2 site, double radius, const ElasticConstants& c);

// Type-erased closed-form potential; sums of fields are fields (superposition).
class AiryFunction {
 public:
  using Evaluator = std::function<AiryDerivatives(Vec2)>;

  AiryFunction() = default;
  explicit AiryFunction(Evaluator term);

  AiryDerivatives derivatives(Vec2 x) const;
  double value(Vec2 x) const { return derivatives(x).value; }
  Vec2 gradient(Vec2 x) const { return derivatives(x).gradient; }
  Sym2 hessian(Vec2 x) const { return derivatives(x).hessian; }
  std::size_t terms() const { return terms_.size(); }

  AiryFunction& operator+=(const AiryFunction& other);
  friend AiryFunction operator+(AiryFunction a, const AiryFunction& b) { return a += b; }
  AiryFunction scaled(double factor) const;

 private:
  std::vector<Evaluator> terms_;
};

AiryFunction affine_function(double a0, Vec2 slope, Vec2 origin = {});
// Plastic part of a disclination system: sum of -s_k v̄(x - y_k).
AiryFunction disclination_plastic_field(std::span<const Disclination> disclinations, const ElasticConstants& c);
// Sum over dislocations of the core fields with radius R.
AiryFunction dislocation_plastic_field(std::span<const Dislocation> dislocations, double eps, double radius,
                                       const ElasticConstants& c, CoreBranch branch = CoreBranch::Physical);
// Sum over dislocations of the limit fields W_0 with radius R.
AiryFunction dislocation_limit_field(std::span<const Dislocation> dislocations, double radius, const ElasticConstants& c);

// σ11 = v_yy, σ12 = -v_xy, σ22 = v_xx.
Sym2 airy_to_stress(const Sym2& hessian);
Sym2 stress_to_strain(const Sym2& stress, const ElasticConstants& c);
Sym2 strain_to_stress(const Sym2& strain, const ElasticConstants& c);
// (1/2)(λ (tr ε)^2 + 2 μ |ε|^2)
double strain_energy_density(const Sym2& strain, const ElasticConstants& c);
// (1/2)(1+ν)/E (|σ|^2 - ν (tr σ)^2)
double stress_energy_density(const Sym2& stress, const ElasticConstants& c);

// CSV x,y,v,s11,s12,s22,e11,e12,e22 at grid nodes inside the region.
void write_stress_csv(std::ostream& out, const AiryFunction& v, const Grid& grid, const Region& region, const ElasticConstants& c);

}  // namespace airy
