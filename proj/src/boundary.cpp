#include "airy/boundary.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "airy/jet.hpp"
#include "airy/json_writer.hpp"
#include "airy/quadrature.hpp"

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinOdeSamples = 2048;

struct SplineValue {
  double value;
  double first;
  double second;
};

// Periodic cubic spline through (t_i, y_i), period t_m - t_0 with t_m closing the loop.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> knots, std::vector<double> values) : t_(std::move(knots)), y_(std::move(values)) {
    const std::size_t m = y_.size();
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t prev = (i + m - 1) % m, next = (i + 1) % m;
      const double hp = step(prev), hn = step(i);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(prev), hp);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 2.0 * (hp + hn));
      trip.emplace_back(static_cast<int>(i), static_cast<int>(next), hn);
      rhs(static_cast<long>(i)) = 6.0 * ((y_[next] - y_[i]) / hn - (y_[i] - y_[prev]) / hp);
    }
    Eigen::SparseMatrix<double> a(static_cast<long>(m), static_cast<long>(m));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success) throw NumericalError("periodic spline: singular system");
    const Eigen::VectorXd m2 = lu.solve(rhs);
    second_.assign(m2.data(), m2.data() + m2.size());
  }

  double period() const { return t_.back() - t_.front(); }

  SplineValue operator()(double t) const {
    const double t0 = t_.front();
    t = t0 + std::fmod(std::fmod(t - t0, period()) + period(), period());
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max<long>(it - t_.begin() - 1, 0)), y_.size() - 1);
    const std::size_t next = (i + 1) % y_.size();
    const double h = step(i);
    const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
    const double mi = second_[i], mn = second_[next];
    const double value = a * y_[i] + b * y_[next] + ((a * a * a - a) * mi + (b * b * b - b) * mn) * h * h / 6.0;
    const double first = (y_[next] - y_[i]) / h + ((1.0 - 3.0 * a * a) * mi + (3.0 * b * b - 1.0) * mn) * h / 6.0;
    return {value, first, a * mi + b * mn};
  }

 private:
  double step(std::size_t i) const { return t_[i + 1] - t_[i]; }

  std::vector<double> t_;  // m + 1 knots
  std::vector<double> y_;  // m values
  std::vector<double> second_;
};

Sym2 hessian_at(const HessianFields& h, Vec2 p) {
  return {interpolate_bilinear(h.xx, p), interpolate_bilinear(h.xy, p), interpolate_bilinear(h.yy, p)};
}

struct TraceSample {
  double value;
  Vec2 gradient;
};

AffineTraceReport affine_trace(const std::vector<TraceSample>& data, const BoundaryCurve& curve) {
  const std::size_t n = curve.size();
  if (n < 3) throw ValidationError("affine_trace_check: curve needs at least 3 samples");
  if (n < kMinOdeSamples || n % 2 != 0)
    throw ValidationError("affine_trace_check: need an even sample count of at least " + std::to_string(kMinOdeSamples));
  const auto pts = curve.points();
  Eigen::MatrixXd a(static_cast<long>(2 * n), 3);
  Eigen::VectorXd y(static_cast<long>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    const long r = static_cast<long>(2 * i);
    const Vec2 nv = curve.normal(i);
    a.row(r) << 1.0, pts[i].x, pts[i].y;
    y(r) = data[i].value;
    a.row(r + 1) << 0.0, nv.x, nv.y;
    y(r + 1) = dot(data[i].gradient, nv);
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  AffineTraceReport out;
  out.c0 = c(0);
  out.slope = {c(1), c(2)};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 nv = curve.normal(i);
    out.trace_residual = std::max(out.trace_residual, std::abs(data[i].value - c(0) - dot(out.slope, pts[i])));
    out.normal_residual = std::max(out.normal_residual, std::abs(dot(data[i].gradient - out.slope, nv)));
  }
  const auto z_of = [&](std::size_t i) { return Vec2{dot(data[i].gradient, curve.tangents()[i]), dot(data[i].gradient, curve.normal(i))}; };
  const std::vector<Vec2> z = transport_traces(z_of(0), curve);
  for (std::size_t s = 0; s + 1 < z.size(); ++s) out.ode_deviation = std::max(out.ode_deviation, norm(z[s] - z_of(2 * s)));
  out.closure_defect = norm(z.back() - z.front());
  out.ode_steps = static_cast<int>(z.size() - 1);
  return out;
}

}  // namespace

BoundaryCurve BoundaryCurve::circle(const Circle& circle, int samples) {
  if (samples < 3) throw ValidationError("BoundaryCurve: at least 3 samples");
  if (!(circle.radius > 0.0)) throw ValidationError("BoundaryCurve: radius must be positive");
  BoundaryCurve out;
  const auto n = static_cast<std::size_t>(samples);
  out.length_ = 2.0 * kPi * circle.radius;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    out.arclength_.push_back(circle.radius * th);
    out.points_.push_back(circle.center + circle.radius * Vec2{std::cos(th), std::sin(th)});
    out.tangents_.push_back({-std::sin(th), std::cos(th)});
    out.curvature_.push_back(1.0 / circle.radius);
  }
  return out;
}

BoundaryCurve BoundaryCurve::sampled(std::span<const Vec2> control_points, int samples) {
  if (control_points.size() < 4) throw ValidationError("BoundaryCurve: at least 4 control points");
  if (samples < 3) throw ValidationError("BoundaryCurve: at least 3 samples");
  std::vector<Vec2> p(control_points.begin(), control_points.end());
  double area = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) area += cross(p[i], p[(i + 1) % p.size()]);
  if (area < 0.0) std::reverse(p.begin(), p.end());
  std::vector<double> knots{0.0};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double chord = norm(p[(i + 1) % p.size()] - p[i]);
    if (!(chord > 0.0)) throw ValidationError("BoundaryCurve: repeated control point");
    knots.push_back(knots.back() + chord);
    xs.push_back(p[i].x);
    ys.push_back(p[i].y);
  }
  const PeriodicSpline sx(knots, xs), sy(knots, ys);
  const auto speed = [&](double t) { return std::hypot(sx(t).first, sy(t).first); };
  // Cumulative arc length at the knots.
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    cumulative.push_back(cumulative.back() + integrate_adaptive(speed, knots[i], knots[i + 1], {1e-13, 0.0, 4000}).value);
  BoundaryCurve out;
  out.length_ = cumulative.back();
  const auto n = static_cast<std::size_t>(samples);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = out.length_ * static_cast<double>(k) / static_cast<double>(n);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t i = static_cast<std::size_t>(std::max<long>(it - cumulative.begin() - 1, 0));
    const double lo = knots[i], hi = knots[i + 1];
    const auto residual = [&](double t) {
      const double s = cumulative[i] + integrate_adaptive(speed, lo, t, {1e-13, 0.0, 4000}).value;
      return std::make_pair(s - target, speed(t));
    };
    std::uintmax_t iterations = 60;
    const double t = boost::math::tools::newton_raphson_iterate(residual, lo + (target - cumulative[i]) / (cumulative[i + 1] - cumulative[i]) * (hi - lo), lo, hi, 50, iterations);
    const SplineValue x = sx(t), y = sy(t);
    const double sp = std::hypot(x.first, y.first);
    out.arclength_.push_back(target);
    out.points_.push_back({x.value, y.value});
    out.tangents_.push_back({x.first / sp, y.first / sp});
    out.curvature_.push_back((x.first * y.second - y.first * x.second) / (sp * sp * sp));
  }
  return out;
}

double tangential_hessian_residual(const AiryFunction& v, const BoundaryCurve& curve) {
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i)
    worst = std::max(worst, norm(v.hessian(curve.points()[i]).apply(curve.tangents()[i])));
  return worst;
}

double tangential_hessian_residual(const ScalarField& v, const BoundaryCurve& curve) {
  const HessianFields h = hessian_fd(v, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Sym2 hess = hessian_at(h, curve.points()[i]);
    if (!std::isfinite(hess.xx + hess.xy + hess.yy)) throw ValidationError("tangential_hessian_residual: curve leaves the field mask");
    worst = std::max(worst, norm(hess.apply(curve.tangents()[i])));
  }
  return worst;
}

std::vector<Vec2> transport_traces(Vec2 initial, const BoundaryCurve& curve) {
  const std::size_t n = curve.size();
  const auto kappa = curve.curvature();
  const double h = 2.0 * curve.spacing();
  const auto rhs = [](double k, Vec2 z) { return Vec2{-k * z.y, k * z.x}; };
  std::vector<Vec2> z{initial};
  for (std::size_t s = 0; 2 * s < n; ++s) {
    const double k0 = kappa[2 * s], km = kappa[2 * s + 1], k1 = kappa[(2 * s + 2) % n];
    const Vec2 y = z.back();
    const Vec2 a = rhs(k0, y);
    const Vec2 b = rhs(km, y + 0.5 * h * a);
    const Vec2 c = rhs(km, y + 0.5 * h * b);
    const Vec2 d = rhs(k1, y + h * c);
    z.push_back(y + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d));
  }
  return z;
}

AffineTraceReport affine_trace_check(const AiryFunction& v, const BoundaryCurve& curve) {
  std::vector<TraceSample> data(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const AiryDerivatives d = v.derivatives(curve.points()[i]);
    data[i] = {d.value, d.gradient};
  }
  return affine_trace(data, curve);
}

AffineTraceReport affine_trace_check(const ScalarField& v, const BoundaryCurve& curve) {
  std::vector<TraceSample> data(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const ValueGradient g = interpolate_bicubic(v, curve.points()[i]);
    data[i] = {g.value, g.gradient};
  }
  return affine_trace(data, curve);
}

AiryFunction random_biharmonic_polynomial(std::uint64_t seed, int degree) {
  if (degree < 0) throw ValidationError("random_biharmonic_polynomial: degree must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  // Per k: Re z^k, Im z^k, |x|² Re z^k, |x|² Im z^k.
  std::vector<std::array<double, 4>> c(static_cast<std::size_t>(degree) + 1);
  for (auto& row : c)
    for (double& v : row) v = coef(rng);
  return AiryFunction([c](Vec2 p) {
    const Jet3 x = Jet3::variable_x(p.x), y = Jet3::variable_y(p.y);
    const Jet3 r2 = x * x + y * y;
    Jet3 re(1.0), im(0.0), sum(0.0);
    for (const auto& row : c) {
      sum = sum + row[0] * re + row[1] * im + row[2] * (r2 * re) + row[3] * (r2 * im);
      const Jet3 next_re = re * x - im * y;
      im = re * y + im * x;
      re = next_re;
    }
    return derivatives_from(sum);
  });
}

std::vector<CorpusField> boundary_corpus(double radius, const ElasticConstants& c, std::uint64_t seed) {
  const Vec2 origin{0.0, 0.0};
  const AiryFunction clamped([radius, c](Vec2 x) { return single_disclination_clamped_derivatives(x, 1.0, {0.0, 0.0}, radius, c); });
  std::vector<CorpusField> out;
  out.push_back({"clamped_disclination", clamped, true});
  out.push_back({"core_dislocation",
                 AiryFunction([radius, c](Vec2 x) { return dislocation_core_derivatives(x, {0.0, 1.0}, {0.0, 0.0}, 0.1 * radius, radius, c); }),
                 true});
  out.push_back({"random_biharmonic", random_biharmonic_polynomial(seed), false});
  out.push_back({"radius_squared", AiryFunction([](Vec2 x) {
                   AiryDerivatives d;
                   d.value = norm2(x);
                   d.gradient = 2.0 * x;
                   d.hessian = {2.0, 0.0, 2.0};
                   return d;
                 }),
                 false});
  out.push_back({"cubic_x1", AiryFunction([](Vec2 x) {
                   AiryDerivatives d;
                   d.value = x.x * x.x * x.x;
                   d.gradient = {3.0 * x.x * x.x, 0.0};
                   d.hessian = {6.0 * x.x, 0.0, 0.0};
                   d.third = {6.0, 0.0, 0.0, 0.0};
                   return d;
                 }),
                 false});
  out.push_back({"clamped_disclination_plus_affine", clamped + affine_function(0.3, {-0.2, 0.5}, origin), true});
  return out;
}

BoundaryClassification classify_boundary(const CorpusField& f, const BoundaryCurve& curve, double hessian_tol, double trace_tol) {
  BoundaryClassification out;
  out.name = f.name;
  out.hessian_residual = tangential_hessian_residual(f.field, curve);
  out.trace = affine_trace_check(f.field, curve);
  out.by_hessian = out.hessian_residual < hessian_tol;
  out.by_trace = out.trace.affine(trace_tol);
  return out;
}

std::string boundary_report_json(std::span<const BoundaryClassification> rows) {
  JsonWriter w;
  w.begin_array();
  for (const auto& r : rows) {
    w.begin_object();
    w.key("field").value(r.name);
    w.key("tangential_hessian_residual").value(r.hessian_residual);
    w.key("affine").begin_object();
    w.key("c0").value(r.trace.c0).key("slope").value(r.trace.slope);
    w.key("trace_residual").value(r.trace.trace_residual).key("normal_residual").value(r.trace.normal_residual);
    w.key("ode_deviation").value(r.trace.ode_deviation).key("closure_defect").value(r.trace.closure_defect);
    w.key("ode_steps").value(r.trace.ode_steps);
    w.end_object();
    w.key("traction_free_by_hessian").value(r.by_hessian).key("traction_free_by_trace").value(r.by_trace);
    w.key("agree").value(r.agree());
    w.end_object();
  }
  w.end_array();
  return w.str();
}

}  // namespace airy
