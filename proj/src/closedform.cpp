#include "airy/closedform.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "airy/fields.hpp"
#include "airy/jet.hpp"
#include "airy/json_writer.hpp"

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;

struct Frame {
  Vec2 e1;
  Vec2 e2;
};

// Ordered orthonormal pair (Π(b)/|b|, b/|b|).
Frame burgers_frame(Vec2 b) {
  const double s = norm(b);
  if (!(s > 0.0)) throw ValidationError("Burgers vector must be nonzero");
  return {rotate_burgers(b) / s, b / s};
}

template <class T>
struct Point {
  T x;
  T y;
};

Point<Jet3> jet_point(Vec2 p) { return {Jet3::variable_x(p.x), Jet3::variable_y(p.y)}; }

template <class T>
T fundamental(const T& x, const T& y, double plane_modulus) {
  const T r2 = x * x + y * y;
  return r2 * log(r2) * (plane_modulus / (16.0 * kPi));
}

template <class T>
T clamped_disclination(const T& x, const T& y, double s, double radius, double plane_modulus) {
  const T r2 = x * x + y * y;
  const double R2 = radius * radius;
  return -s * fundamental(x, y, plane_modulus) - (s * plane_modulus / (16.0 * kPi)) * (T(R2) - r2 * (1.0 + std::log(R2)));
}

// Annulus branch of the core field, in frame coordinates (u along Π(b)/|b|).
template <class T>
T core_annulus(const T& u, const T& w, double s, const CoreCoefficients& k, double plane_modulus) {
  const T r2 = u * u + w * w;
  return (s * plane_modulus / (16.0 * kPi)) * (T(k.alpha) + k.beta * reciprocal(r2) + k.gamma * r2 + 2.0 * log(r2)) * u;
}

template <class T>
T core_inner(const T& u, double s, double eps, const CoreCoefficients& k, double plane_modulus) {
  return (s * plane_modulus / (16.0 * kPi)) * (k.alpha + k.beta / (eps * eps) + eps * eps * k.gamma + 4.0 * std::log(eps)) * u;
}

template <class T>
T limit_field(const T& u, const T& w, double s, double radius, double plane_modulus) {
  const T r2 = u * u + w * w;
  const double R2 = radius * radius;
  return (s * plane_modulus / (8.0 * kPi)) * (T(1.0 - std::log(R2)) - r2 / R2 + log(r2)) * u;
}

// Frame coordinates of p relative to site, as jets in the global variables.
template <class T>
Point<T> to_frame(const Point<T>& p, Vec2 site, const Frame& f) {
  const T dx = p.x - site.x;
  const T dy = p.y - site.y;
  return {dx * f.e1.x + dy * f.e1.y, dx * f.e2.x + dy * f.e2.y};
}

}  // namespace

AiryDerivatives& AiryDerivatives::operator+=(const AiryDerivatives& o) {
  value += o.value;
  gradient = gradient + o.gradient;
  hessian = hessian + o.hessian;
  for (std::size_t k = 0; k < 4; ++k) third[k] += o.third[k];
  return *this;
}

AiryDerivatives& AiryDerivatives::operator*=(double s) {
  value *= s;
  gradient = s * gradient;
  hessian = s * hessian;
  for (double& t : third) t *= s;
  return *this;
}

AiryDerivatives derivatives_from(const Jet3& jet) {
  AiryDerivatives d;
  d.value = jet.value();
  d.gradient = {jet.derivative(1, 0), jet.derivative(0, 1)};
  d.hessian = {jet.derivative(2, 0), jet.derivative(1, 1), jet.derivative(0, 2)};
  d.third = {jet.derivative(3, 0), jet.derivative(2, 1), jet.derivative(1, 2), jet.derivative(0, 3)};
  return d;
}

double fundamental_airy(Vec2 x, const ElasticConstants& c) {
  const double r2 = norm2(x);
  if (r2 == 0.0) return 0.0;
  return fundamental(x.x, x.y, c.plane_modulus());
}

AiryDerivatives fundamental_airy_derivatives(Vec2 x, const ElasticConstants& c) {
  if (norm2(x) == 0.0) throw ValidationError("fundamental_airy: derivatives are singular at the pole");
  const auto p = jet_point(x);
  return derivatives_from(fundamental(p.x, p.y, c.plane_modulus()));
}

namespace {

void require_in_ball(Vec2 x, Vec2 site, double radius, const char* what) {
  if (!(radius > 0.0)) throw ValidationError(std::string(what) + ": radius must be positive");
  if (norm(x - site) > radius * (1.0 + 1e-12)) throw ValidationError(std::string(what) + ": point outside the ball");
}

}  // namespace

double single_disclination_clamped(Vec2 x, double s, Vec2 site, double radius, const ElasticConstants& c) {
  require_in_ball(x, site, radius, "single_disclination_clamped");
  const Vec2 d = x - site;
  if (norm2(d) == 0.0) return -s * c.plane_modulus() * radius * radius / (16.0 * kPi);
  return clamped_disclination(d.x, d.y, s, radius, c.plane_modulus());
}

AiryDerivatives single_disclination_clamped_derivatives(Vec2 x, double s, Vec2 site, double radius, const ElasticConstants& c) {
  require_in_ball(x, site, radius, "single_disclination_clamped");
  const Vec2 d = x - site;
  if (norm2(d) == 0.0) throw ValidationError("single_disclination_clamped: derivatives are singular at the site");
  const auto p = jet_point(d);
  return derivatives_from(clamped_disclination(p.x, p.y, s, radius, c.plane_modulus()));
}

double dipole_airy(Vec2 x, double s, double h, const ElasticConstants& c) {
  if (!(h > 0.0)) throw ValidationError("dipole_airy: h must be positive");
  return -s * (fundamental_airy(x - Vec2{0.5 * h, 0.0}, c) - fundamental_airy(x + Vec2{0.5 * h, 0.0}, c));
}

double dipole_airy(Vec2 x, const DisclinationDipole& d, const ElasticConstants& c) {
  if (!(d.spacing > 0.0)) throw ValidationError("dipole_airy: h must be positive");
  return -d.charge() * (fundamental_airy(x - d.positive_pole(), c) - fundamental_airy(x - d.negative_pole(), c));
}

AiryDerivatives dipole_airy_derivatives(Vec2 x, const DisclinationDipole& d, const ElasticConstants& c) {
  AiryDerivatives plus = fundamental_airy_derivatives(x - d.positive_pole(), c);
  AiryDerivatives minus = fundamental_airy_derivatives(x - d.negative_pole(), c);
  minus *= -1.0;
  plus += minus;
  plus *= -d.charge();
  return plus;
}

AiryDerivatives dipole_derivative_airy(Vec2 x, double s, const ElasticConstants& c) {
  if (norm2(x) == 0.0) throw ValidationError("dipole_derivative_airy: singular at the origin");
  const auto p = jet_point(x);
  const Jet3 r2 = p.x * p.x + p.y * p.y;
  return derivatives_from((c.plane_modulus() * s / (8.0 * kPi)) * (p.x * log(r2) + p.x));
}

CoreCoefficients core_coefficients(double eps, double radius) {
  if (!(eps > 0.0) || !(eps < radius)) throw ValidationError("core coefficients: 0 < eps < R violated");
  const double e2 = eps * eps, R2 = radius * radius;
  return {2.0 * (R2 - e2) / (R2 + e2) - 2.0 * std::log(R2), 2.0 * e2 * R2 / (R2 + e2), -2.0 / (R2 + e2)};
}

double dislocation_core_airy(Vec2 x, Vec2 b, Vec2 site, double eps, double radius, const ElasticConstants& c, CoreBranch branch) {
  const CoreCoefficients k = core_coefficients(eps, radius);
  const Frame f = burgers_frame(b);
  const Vec2 d = x - site;
  const double u = dot(d, f.e1), w = dot(d, f.e2);
  const double r2 = u * u + w * w;
  if (r2 < eps * eps && branch == CoreBranch::Physical) return core_inner(u, norm(b), eps, k, c.plane_modulus());
  if (r2 == 0.0) throw ValidationError("dislocation_core_airy: annulus extension is singular at the site");
  return core_annulus(u, w, norm(b), k, c.plane_modulus());
}

AiryDerivatives dislocation_core_derivatives(Vec2 x, Vec2 b, Vec2 site, double eps, double radius, const ElasticConstants& c,
                                             CoreBranch branch) {
  const CoreCoefficients k = core_coefficients(eps, radius);
  const Frame f = burgers_frame(b);
  const Vec2 d = x - site;
  const double s = norm(b);
  if (norm2(d) < eps * eps && branch == CoreBranch::Physical) {
    const double slope = core_inner(1.0, s, eps, k, c.plane_modulus());
    AiryDerivatives a;
    a.value = slope * dot(d, f.e1);
    a.gradient = slope * f.e1;
    return a;
  }
  if (norm2(d) == 0.0) throw ValidationError("dislocation_core_airy: annulus extension is singular at the site");
  const Point<Jet3> q = to_frame(jet_point(x), site, f);
  return derivatives_from(core_annulus(q.x, q.y, s, k, c.plane_modulus()));
}

double dislocation_limit_airy(Vec2 x, Vec2 b, Vec2 site, double radius, const ElasticConstants& c) {
  const Frame f = burgers_frame(b);
  const Vec2 d = x - site;
  if (norm2(d) == 0.0) throw ValidationError("dislocation_limit_airy: singular at the site");
  return limit_field(dot(d, f.e1), dot(d, f.e2), norm(b), radius, c.plane_modulus());
}

AiryDerivatives dislocation_limit_derivatives(Vec2 x, Vec2 b, Vec2 site, double radius, const ElasticConstants& c) {
  const Frame f = burgers_frame(b);
  if (norm2(x - site) == 0.0) throw ValidationError("dislocation_limit_airy: singular at the site");
  const Point<Jet3> q = to_frame(jet_point(x), site, f);
  return derivatives_from(limit_field(q.x, q.y, norm(b), radius, c.plane_modulus()));
}

AiryFunction::AiryFunction(Evaluator term) { terms_.push_back(std::move(term)); }

AiryDerivatives AiryFunction::derivatives(Vec2 x) const {
  AiryDerivatives total;
  for (const auto& t : terms_) total += t(x);
  return total;
}

AiryFunction& AiryFunction::operator+=(const AiryFunction& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

AiryFunction AiryFunction::scaled(double factor) const {
  AiryFunction out;
  for (const auto& t : terms_) {
    out.terms_.push_back([t, factor](Vec2 x) {
      AiryDerivatives d = t(x);
      d *= factor;
      return d;
    });
  }
  return out;
}

AiryFunction affine_function(double a0, Vec2 slope, Vec2 origin) {
  return AiryFunction([=](Vec2 x) {
    AiryDerivatives d;
    d.value = a0 + dot(slope, x - origin);
    d.gradient = slope;
    return d;
  });
}

AiryFunction disclination_plastic_field(std::span<const Disclination> disclinations, const ElasticConstants& c) {
  AiryFunction out;
  for (const auto& d : disclinations) {
    out += AiryFunction([d, c](Vec2 x) {
      AiryDerivatives v = fundamental_airy_derivatives(x - d.site, c);
      v *= -d.frank_angle;
      return v;
    });
  }
  return out;
}

AiryFunction dislocation_plastic_field(std::span<const Dislocation> dislocations, double eps, double radius,
                                       const ElasticConstants& c, CoreBranch branch) {
  AiryFunction out;
  for (const auto& d : dislocations) {
    out += AiryFunction([=](Vec2 x) { return dislocation_core_derivatives(x, d.burgers, d.site, eps, radius, c, branch); });
  }
  return out;
}

AiryFunction dislocation_limit_field(std::span<const Dislocation> dislocations, double radius, const ElasticConstants& c) {
  AiryFunction out;
  for (const auto& d : dislocations) {
    out += AiryFunction([=](Vec2 x) { return dislocation_limit_derivatives(x, d.burgers, d.site, radius, c); });
  }
  return out;
}

Sym2 airy_to_stress(const Sym2& h) { return {h.yy, -h.xy, h.xx}; }

Sym2 stress_to_strain(const Sym2& s, const ElasticConstants& c) {
  const double k = c.compliance(), nu = c.poisson();
  return {k * ((1.0 - nu) * s.xx - nu * s.yy), k * s.xy, k * ((1.0 - nu) * s.yy - nu * s.xx)};
}

Sym2 strain_to_stress(const Sym2& e, const ElasticConstants& c) {
  const double tr = e.trace();
  return {c.lambda() * tr + 2.0 * c.mu() * e.xx, 2.0 * c.mu() * e.xy, c.lambda() * tr + 2.0 * c.mu() * e.yy};
}

double strain_energy_density(const Sym2& e, const ElasticConstants& c) {
  const double tr = e.trace();
  return 0.5 * (c.lambda() * tr * tr + 2.0 * c.mu() * e.norm2());
}

double stress_energy_density(const Sym2& s, const ElasticConstants& c) {
  const double tr = s.trace();
  return 0.5 * c.compliance() * (s.norm2() - c.poisson() * tr * tr);
}

void write_stress_csv(std::ostream& out, const AiryFunction& v, const Grid& grid, const Region& region, const ElasticConstants& c) {
  out << "x,y,v,s11,s12,s22,e11,e12,e22\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 p = grid.point(k);
    if (!region.contains(p)) continue;
    const AiryDerivatives d = v.derivatives(p);
    const Sym2 s = airy_to_stress(d.hessian);
    const Sym2 e = stress_to_strain(s, c);
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(d.value) << ',' << format_double(s.xx) << ','
        << format_double(s.xy) << ',' << format_double(s.yy) << ',' << format_double(e.xx) << ',' << format_double(e.xy) << ','
        << format_double(e.yy) << '\n';
  }
}

}  // namespace airy
