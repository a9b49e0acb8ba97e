#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "airy/closedform.hpp"
#include "airy/core.hpp"
#include "airy/fields.hpp"

namespace airy {

// Closed counter-clockwise curve sampled uniformly in arc length; normals point outward.
class BoundaryCurve {
 public:
  static BoundaryCurve circle(const Circle& circle, int samples = 4096);
  // Closed polygon of control points (not repeating the first), interpolated by a periodic cubic spline in
  // chord-length parameter, then resampled uniformly in arc length. Clockwise input is reversed.
  static BoundaryCurve sampled(std::span<const Vec2> control_points, int samples = 4096);

  std::size_t size() const { return points_.size(); }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(points_.size()); }
  std::span<const double> arclength() const { return arclength_; }
  std::span<const Vec2> points() const { return points_; }
  std::span<const Vec2> tangents() const { return tangents_; }
  std::span<const double> curvature() const { return curvature_; }
  Vec2 normal(std::size_t i) const { return {tangents_[i].y, -tangents_[i].x}; }

 private:
  BoundaryCurve() = default;

  double length_ = 0.0;
  std::vector<double> arclength_;
  std::vector<Vec2> points_;
  std::vector<Vec2> tangents_;
  std::vector<double> curvature_;
};

// max_i |∇²v(γ_i) t_i|.
double tangential_hessian_residual(const AiryFunction& v, const BoundaryCurve& curve);
// Grid field: central-difference Hessians interpolated to the curve; throws if the curve leaves the mask.
double tangential_hessian_residual(const ScalarField& v, const BoundaryCurve& curve);

struct AffineTraceReport {
  double c0 = 0.0;
  Vec2 slope;
  double trace_residual = 0.0;   // max |v - a| on the curve
  double normal_residual = 0.0;  // max |∂_n v - ∂_n a|
  // (z¹, z²) = (∂_t v, ∂_n v) transported by z¹' = -κ z², z²' = κ z¹ from the first sample (RK4).
  double ode_deviation = 0.0;  // max distance to the sampled (∂_t v, ∂_n v)
  double closure_defect = 0.0;  // |z(ℓ) - z(0)|
  int ode_steps = 0;

  bool affine(double tol) const { return trace_residual < tol && normal_residual < tol; }
};

// Needs at least 2048 samples so the integrator takes at least 1024 steps of two samples each.
AffineTraceReport affine_trace_check(const AiryFunction& v, const BoundaryCurve& curve);
AffineTraceReport affine_trace_check(const ScalarField& v, const BoundaryCurve& curve);

// Transported (z¹, z²) at every even sample, for the basis-property checks.
std::vector<Vec2> transport_traces(Vec2 initial, const BoundaryCurve& curve);

// Σ_{k ≤ degree} harmonic parts Re/Im z^k plus |x|² times harmonic parts, with seeded coefficients in [-1, 1].
AiryFunction random_biharmonic_polynomial(std::uint64_t seed, int degree = 3);

struct CorpusField {
  std::string name;
  AiryFunction field;
  bool traction_free = false;  // known classification
};

// Fields on the circle B_R(0): clamped disclination, core dislocation field, a random biharmonic polynomial,
// |x|², x₁³, and the clamped disclination plus an affine function.
std::vector<CorpusField> boundary_corpus(double radius, const ElasticConstants& c, std::uint64_t seed = 7);

struct BoundaryClassification {
  std::string name;
  double hessian_residual = 0.0;
  AffineTraceReport trace;
  bool by_hessian = false;
  bool by_trace = false;
  bool agree() const { return by_hessian == by_trace; }
};

BoundaryClassification classify_boundary(const CorpusField& f, const BoundaryCurve& curve, double hessian_tol = 1e-6,
                                         double trace_tol = 1e-6);

std::string boundary_report_json(std::span<const BoundaryClassification> rows);

}  // namespace airy
