#include "airy/asymptotics.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <ostream>

#include "airy/closedform.hpp"
#include "airy/energy.hpp"
#include "airy/json_writer.hpp"

namespace airy {

namespace {

constexpr double kPi = std::numbers::pi;

double energy_density(const Sym2& hessian, const ElasticConstants& c) {
  const double tr = hessian.trace();
  return 0.5 * c.compliance() * (hessian.norm2() - c.poisson() * tr * tr);
}

// ∫ over {r0 < |x| < r1} of f, with r = e^u so the radial weight becomes r² du, θ split at 0 and π.
double annulus_integral(const std::function<double(Vec2)>& f, double r0, double r1, const QuadratureOptions& options) {
  const auto polar = [&](double u, double theta) {
    const double r = std::exp(u);
    return f({r * std::cos(theta), r * std::sin(theta)}) * r * r;
  };
  return integrate_nested(polar, std::log(r0), std::log(r1), 0.0, kPi, options).value +
         integrate_nested(polar, std::log(r0), std::log(r1), kPi, 2.0 * kPi, options).value;
}

// ∫ over B_r of f when f has integrable singularities at (±r/2, 0): radial split at r/2, angular at 0 and π.
double pole_ball_integral(const std::function<double(Vec2)>& f, double r, const QuadratureOptions& options) {
  const auto polar = [&](double rho, double theta) { return f({rho * std::cos(theta), rho * std::sin(theta)}) * rho; };
  double total = 0.0;
  for (const auto& [a, b] : {std::pair{0.0, 0.5 * r}, std::pair{0.5 * r, r}})
    for (const auto& [t0, t1] : {std::pair{0.0, kPi}, std::pair{kPi, 2.0 * kPi}}) total += integrate_nested(polar, a, b, t0, t1, options).value;
  return total;
}

// The three integrands of the dipole Hessian decomposition, poles at (±h/2, 0).
std::array<double, 3> dipole_integrands(Vec2 x, double h) {
  const double xm = x.x - 0.5 * h, xp = x.x + 0.5 * h;
  const double rm2 = xm * xm + x.y * x.y, rp2 = xp * xp + x.y * x.y;
  const double lg = std::log(rm2 / rp2);
  const double y2 = x.y * x.y;
  const double q = xm / rm2 - xp / rp2;
  return {lg * lg, h * h * y2 * y2 * x.x * x.x / (rm2 * rm2 * rp2 * rp2), y2 * q * q};
}

std::vector<double> flagged_fit_inputs(const std::vector<double>& v, const std::vector<bool>& ok) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (ok[i]) out.push_back(v[i]);
  return out;
}

double correction_sum(std::span<const Dislocation> dislocations, double eps, double separation, double radius,
                      const ElasticConstants& c) {
  double sum = 0.0;
  for (const auto& d : dislocations) {
    const double s2 = norm2(d.burgers);
    sum += core_remainder(s2, eps, separation, radius, c) - core_remainder_limit(s2, separation, radius, c);
  }
  return sum;
}

double burgers_norm2_sum(std::span<const Dislocation> dislocations) {
  double s2 = 0.0;
  for (const auto& d : dislocations) s2 += norm2(d.burgers);
  return s2;
}

void require_decreasing(std::span<const double> values, const char* what) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1])) throw ValidationError(std::string(what) + " must be strictly decreasing");
}

}  // namespace

double log_coefficient(double burgers_norm2_sum, const ElasticConstants& c) {
  return c.plane_modulus() * burgers_norm2_sum / (8.0 * kPi);
}

double dipole_energy_G(double s, double h, double radius, const ElasticConstants& c, const QuadratureOptions& options) {
  if (!(h > 0.0) || !(h < radius)) throw ValidationError("dipole_energy_G: requires 0 < h < R");
  if (s == 0.0) return 0.0;
  const DisclinationDipole dipole{{0.0, 0.0}, {0.0, s}, h};
  const auto density = [&](Vec2 x) { return energy_density(dipole_airy_derivatives(x, dipole, c).hessian, c); };
  return annulus_integral(density, h, radius, options) + pole_ball_integral(density, h, options);
}

DipoleSweep dipole_scaling_sweep(double s, double radius, const ElasticConstants& c, std::span<const double> spacings, int grid_n,
                                 const SolverOptions& options) {
  for (double h : spacings)
    if (!(h > 0.0) || !(h < radius)) throw ValidationError("dipole_scaling_sweep: every h must lie in (0, R)");
  require_decreasing(spacings, "dipole_scaling_sweep: h-list");
  DipoleSweep sweep;
  sweep.g_limit = log_coefficient(s * s, c);
  sweep.i_limit = -sweep.g_limit;
  sweep.samples.resize(spacings.size());
  const Circle domain{{0.0, 0.0}, radius};
  const double delta = Grid::covering(domain, grid_n).spacing();
  parallel_for(spacings.size(), [&](std::size_t i) {
    const double h = spacings[i];
    DipoleSample& out = sweep.samples[i];
    out.spacing = h;
    out.energy_G = dipole_energy_G(s, h, radius, c, {1e-9, 0.0, 4000});
    out.g_ratio = out.energy_G / (h * h * std::log(radius / h));
    if (h < 4.0 * delta) {
      out.flag = "unresolved: h < 4 grid spacings";
      return;
    }
    const std::array<Disclination, 2> pair{Disclination{{0.5 * h, 0.0}, s}, Disclination{{-0.5 * h, 0.0}, -s}};
    out.minimum_I = solve_clamped_disclination(pair, domain, c, grid_n, options).value();
    out.i_ratio = out.minimum_I / (h * h * std::abs(std::log(h)));
    out.solved = true;
  });
  return sweep;
}

double DipoleIntegrals::scale() const { return spacing * spacing * std::log(radius / spacing); }

std::array<double, 3> DipoleIntegrals::normalized_annulus() const {
  return {annulus[0] / scale(), annulus[1] / scale(), annulus[2] / scale()};
}

std::array<double, 3> DipoleIntegrals::normalized_ball() const { return {ball[0] / scale(), ball[1] / scale(), ball[2] / scale()}; }

DipoleIntegrals appendix_b_integrals(double h, double radius, const QuadratureOptions& options) {
  if (!(h > 0.0) || !(h < radius)) throw ValidationError("appendix_b_integrals: requires 0 < h < R");
  DipoleIntegrals out;
  out.spacing = h;
  out.radius = radius;
  out.limits = {4.0 * kPi, kPi / 8.0, kPi / 2.0};
  for (std::size_t k = 0; k < 3; ++k) {
    out.annulus[k] = annulus_integral([&](Vec2 x) { return dipole_integrands(x, h)[k]; }, h, radius, options);
    // Each integrand is scale invariant up to the area factor, so B_h is h² times B_1 at unit spacing.
    QuadratureOptions ball_options = options;
    ball_options.relative_tolerance = std::max(options.relative_tolerance, 1e-8);
    out.ball[k] = h * h * pole_ball_integral([&](Vec2 x) { return dipole_integrands(x, 1.0)[k]; }, 1.0, ball_options);
  }
  return out;
}

double angular_factor() {
  return integrate_adaptive([](double t) { return std::pow(std::sin(t), 4) * std::pow(std::cos(t), 2); }, 0.0, 2.0 * kPi,
                            {1e-14, 0.0, 4000})
      .value;
}

double core_remainder(double s2, double eps, double r, double radius, const ElasticConstants& c) {
  const double e2 = eps * eps, r2 = r * r, big2 = radius * radius;
  const double a = (r2 - e2) / (big2 + e2), b = (r2 + e2) / (big2 + e2), ratio = big2 / r2;
  const double shear = s2 / (32.0 * kPi) * c.young() / ((1.0 - c.poisson()) * (1.0 - c.poisson()) * (1.0 + c.poisson()));
  return s2 / (8.0 * kPi) * c.plane_modulus() * (2.0 * (big2 - e2) / (big2 + e2) + a * (b - 2.0) - 2.0 * std::log(radius)) +
         shear * a * (ratio - 1.0) * (b * (ratio + 1.0) - 2.0);
}

double core_remainder_limit(double s2, double r, double radius, const ElasticConstants& c) {
  return core_remainder(s2, 0.0, r, radius, c);
}

AnnulusClosedForm annulus_energy_closed_form(double s, double eps, double r, double radius, const ElasticConstants& c) {
  if (!(eps > 0.0) || !(eps < r) || !(r <= radius)) throw ValidationError("annulus_energy_closed_form: requires 0 < eps < r <= R");
  const double s2 = s * s;
  const double k = log_coefficient(s2, c);
  const double e2 = eps * eps, r2 = r * r, big2 = radius * radius;
  const double t = (r2 - e2) / (big2 + e2), b = (r2 + e2) / (big2 + e2), ratio = big2 / r2;
  const double shear = s2 / (32.0 * kPi) * c.young() / ((1.0 - c.poisson()) * (1.0 - c.poisson()) * (1.0 + c.poisson()));
  AnnulusClosedForm out;
  out.energy_G = k * std::log(r / eps) + k * t * (b - 2.0) + shear * t * (ratio - 1.0) * (b * (ratio + 1.0) - 2.0);
  out.f_eps = core_remainder(s2, eps, r, radius, c);
  out.f_limit = core_remainder_limit(s2, r, radius, c);
  out.combined = -k * std::log(1.0 / eps) + k * std::log(r) + out.f_eps;
  return out;
}

double core_minimum(double s, double eps, double radius, const ElasticConstants& c) {
  return -annulus_energy_closed_form(s, eps, radius, radius, c).energy_G;
}

RenormalizedEnergy renormalized_energy(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                                       int grid_n, std::optional<double> separation, const SolverOptions& options, int n_quad) {
  RenormalizedEnergy out;
  if (dislocations.empty()) return out;
  for (const auto& d : dislocations)
    if (!(norm(d.burgers) > 0.0)) throw ValidationError("renormalized_energy: Burgers vector must be nonzero");
  const auto sites = dislocation_sites(dislocations);
  const double dmax = min_separation(sites, domain);
  if (!(dmax > 0.0)) throw ValidationError("renormalized_energy: sites must be distinct and inside the domain");
  out.separation = separation.value_or(dmax);
  if (!(out.separation > 0.0) || out.separation > dmax)
    throw ValidationError("renormalized_energy: D must lie in (0, " + format_double(dmax) + "]");
  out.plastic_radius = plastic_radius(dislocations, domain);
  const double radius = out.plastic_radius, dd = out.separation;

  std::vector<AiryFunction> fields;
  for (const auto& d : dislocations)
    fields.emplace_back([d, radius, c](Vec2 x) { return dislocation_limit_derivatives(x, d.burgers, d.site, radius, c); });
  const std::size_t n = dislocations.size();
  std::vector<double> outer(n * n);
  parallel_for(n * n, [&](std::size_t p) {
    outer[p] = boundary_pair_form(fields[p / n], fields[p % n], domain, true, c, n_quad);
  });

  double self = 0.0, literal_self = 0.0, interaction = 0.0, literal_interaction = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double own = 0.5 * boundary_pair_form(fields[j], fields[j], {sites[j], dd}, false, c, n_quad);
    self += 0.5 * outer[j * n + j] + own;
    literal_self += 0.5 * outer[j * n + j] + own;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      literal_self += 0.5 * boundary_pair_form(fields[j], fields[j], {sites[k], dd}, false, c, n_quad);
      const Vec2 pb = rotate_burgers(dislocations[j].burgers);
      interaction += 0.5 * (outer[j * n + k] + dot(fields[k].gradient(sites[j]), pb));
      literal_interaction += outer[j * n + k];
    }
  }
  const double k = log_coefficient(burgers_norm2_sum(dislocations), c);
  out.self = self + k * std::log(dd);
  out.literal_self = literal_self + k * std::log(dd);
  out.interaction = interaction;
  out.literal_interaction = literal_interaction;
  out.elastic = solve_elastic_correction(dislocations, domain, c, grid_n, options).value();
  for (const auto& d : dislocations) out.core += core_remainder_limit(norm2(d.burgers), dd, radius, c);
  return out;
}

double ExpansionFit::slope_rel_err() const { return std::abs(slope / analytic_slope - 1.0); }
double ExpansionFit::constant_rel_err() const { return std::abs(constant / reference_constant - 1.0); }

ExpansionFit fit_expansion(std::span<const double> eps, std::span<const double> values, std::span<const double> corrections,
                           std::size_t tail) {
  if (eps.size() != values.size() || corrections.size() != values.size())
    throw ValidationError("fit_expansion: sample arrays differ in length");
  if (eps.size() < 3) throw ValidationError("fit_expansion: at least 3 samples are required");
  if (tail < 3) throw ValidationError("fit_expansion: fit tail must be at least 3");
  for (double e : eps)
    if (!(e > 0.0)) throw ValidationError("fit_expansion: eps must be positive");
  require_decreasing(eps, "fit_expansion: eps");
  ExpansionFit fit;
  fit.eps.assign(eps.begin(), eps.end());
  fit.values.assign(values.begin(), values.end());
  fit.corrections.assign(corrections.begin(), corrections.end());
  fit.tail = std::min(tail, eps.size());
  const std::size_t first = eps.size() - fit.tail;
  const long m = static_cast<long>(fit.tail);
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m), raw(m);
  for (long i = 0; i < m; ++i) {
    const std::size_t s = first + static_cast<std::size_t>(i);
    a(i, 0) = std::abs(std::log(eps[s]));
    a(i, 1) = 1.0;
    raw(i) = values[s];
    y(i) = values[s] - corrections[s];
  }
  const auto qr = a.colPivHouseholderQr();
  const Eigen::Vector2d coef = qr.solve(y), raw_coef = qr.solve(raw);
  fit.slope = coef(0);
  fit.constant = coef(1);
  fit.raw_slope = raw_coef(0);
  fit.raw_constant = raw_coef(1);
  const Eigen::VectorXd res = y - a * coef;
  fit.residuals.assign(res.data(), res.data() + res.size());
  const long dof = m - 2;
  const Eigen::Matrix2d cov = (a.transpose() * a).inverse() * (res.squaredNorm() / static_cast<double>(dof));
  fit.slope_se = std::sqrt(cov(0, 0));
  fit.constant_se = std::sqrt(cov(1, 1));
  const double t = boost::math::quantile(boost::math::complement(boost::math::students_t(static_cast<double>(dof)), 0.025));
  fit.slope_ci = t * fit.slope_se;
  fit.constant_ci = t * fit.constant_se;
  fit.fitted = true;
  return fit;
}

namespace {

// Shared driver for sweeps over core radii; solve(i) returns the functional value of sample i.
ExpansionFit run_expansion(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                           const std::vector<double>& eps, int grid_n, std::size_t tail, const SolverOptions& options,
                           const std::function<double(std::size_t)>& solve) {
  ExpansionFit fit;
  fit.eps = eps;
  fit.values.assign(eps.size(), 0.0);
  fit.corrections.assign(eps.size(), 0.0);
  if (dislocations.empty()) return fit;
  const double dd = min_separation(dislocation_sites(dislocations), domain);
  std::vector<std::string> errors(eps.size());
  std::vector<bool> ok(eps.size(), false);
  const double radius = plastic_radius(dislocations, domain);
  parallel_for(eps.size(), [&](std::size_t i) {
    try {
      fit.values[i] = solve(i);
      fit.corrections[i] = correction_sum(dislocations, eps[i], dd, radius, c);
      ok[i] = true;
    } catch (const std::exception& e) {
      errors[i] = "eps=" + format_double(eps[i]) + ": " + e.what();
    }
  });
  const auto ok_eps = flagged_fit_inputs(eps, ok), ok_values = flagged_fit_inputs(fit.values, ok),
             ok_corr = flagged_fit_inputs(fit.corrections, ok);
  const RenormalizedEnergy ren = renormalized_energy(dislocations, domain, c, grid_n, {}, options);
  ExpansionFit out = ok_eps.size() >= 3 ? fit_expansion(ok_eps, ok_values, ok_corr, tail) : fit;
  out.eps = fit.eps;
  out.values = fit.values;
  out.corrections = fit.corrections;
  for (auto& e : errors)
    if (!e.empty()) out.failures.push_back(e);
  if (ok_eps.size() < 3) out.failures.push_back("fewer than 3 successful samples, no fit");
  out.analytic_slope = -log_coefficient(burgers_norm2_sum(dislocations), c);
  out.reference_constant = ren.constant();
  return out;
}

}  // namespace

ExpansionFit expansion_check(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                             std::span<const double> eps, int grid_n, std::size_t tail, const SolverOptions& options) {
  require_decreasing(eps, "expansion_check: eps");
  const std::vector<double> list(eps.begin(), eps.end());
  return run_expansion(dislocations, domain, c, list, grid_n, tail, options, [&](std::size_t i) {
    return solve_core_constrained(dislocations, list[i], domain, c, grid_n, options).value();
  });
}

double diagonal_core_radius(double h, double separation) { return std::min(std::sqrt(h), 0.9 * separation); }

ExpansionFit diagonal_dipole_limit(std::span<const Dislocation> targets, const Circle& domain, const ElasticConstants& c,
                                   std::span<const double> spacings, int grid_n, std::size_t tail, const SolverOptions& options) {
  require_decreasing(spacings, "diagonal_dipole_limit: h-list");
  const double dd = targets.empty() ? domain.radius : min_separation(dislocation_sites(targets), domain);
  std::vector<double> eps;
  for (double h : spacings) {
    const double e = diagonal_core_radius(h, dd);
    if (!(h > 0.0) || !(h < e)) throw ValidationError("diagonal_dipole_limit: need 0 < h < eps(h) = " + format_double(e));
    eps.push_back(e);
  }
  require_decreasing(eps, "diagonal_dipole_limit: eps(h) after clipping");
  return run_expansion(targets, domain, c, eps, grid_n, tail, options, [&](std::size_t i) {
    std::vector<DisclinationDipole> dipoles;
    for (const auto& d : targets) dipoles.push_back({d.site, d.burgers, spacings[i]});
    return solve_dipole_core(dipoles, eps[i], domain, c, grid_n, options).value();
  });
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param,value,normalized,analytic_limit,rel_err\n";
  for (const auto& r : rows)
    out << format_double(r.param) << ',' << format_double(r.value) << ',' << format_double(r.normalized) << ','
        << format_double(r.analytic_limit) << ',' << format_double(r.rel_err) << '\n';
}

std::vector<SweepRow> sweep_rows(const DipoleSweep& sweep) {
  std::vector<SweepRow> rows;
  for (const auto& s : sweep.samples)
    rows.push_back({s.spacing, s.energy_G, s.g_ratio, sweep.g_limit,
                    sweep.g_limit == 0.0 ? std::abs(s.g_ratio) : std::abs(s.g_ratio / sweep.g_limit - 1.0)});
  return rows;
}

std::vector<SweepRow> sweep_rows(const ExpansionFit& fit) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < fit.eps.size(); ++i) {
    const double l = std::abs(std::log(fit.eps[i]));
    const double predicted = fit.analytic_slope * l + fit.reference_constant;
    const double normalized = l == 0.0 ? 0.0 : (fit.values[i] - fit.corrections[i] - fit.reference_constant) / l;
    rows.push_back({fit.eps[i], fit.values[i], normalized, fit.analytic_slope,
                    predicted == 0.0 ? 0.0 : std::abs((fit.values[i] - fit.corrections[i]) / predicted - 1.0)});
  }
  return rows;
}

std::string expansion_fit_json(const ExpansionFit& fit) {
  JsonWriter w;
  w.begin_object();
  w.key("eps").value(std::span<const double>(fit.eps));
  w.key("values").value(std::span<const double>(fit.values));
  w.key("finite_core_corrections").value(std::span<const double>(fit.corrections));
  w.key("fit_tail").value(fit.tail);
  w.key("fitted").value(fit.fitted);
  if (fit.fitted) {
    w.key("slope").value(fit.slope).key("slope_se").value(fit.slope_se).key("slope_ci95").value(fit.slope_ci);
    w.key("constant").value(fit.constant).key("constant_se").value(fit.constant_se).key("constant_ci95").value(fit.constant_ci);
    w.key("residuals").value(std::span<const double>(fit.residuals));
    w.key("raw_slope").value(fit.raw_slope).key("raw_constant").value(fit.raw_constant);
    w.key("analytic_slope").value(fit.analytic_slope).key("reference_constant").value(fit.reference_constant);
    w.key("slope_rel_err").value(fit.slope_rel_err()).key("constant_rel_err").value(fit.constant_rel_err());
  }
  w.key("tolerances_empirical").value(true);
  w.key("partial").value(fit.partial());
  w.key("failures").begin_array();
  for (const auto& f : fit.failures) w.value(f);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string dipole_sweep_json(const DipoleSweep& sweep) {
  JsonWriter w;
  w.begin_object();
  w.key("g_limit").value(sweep.g_limit).key("i_limit").value(sweep.i_limit);
  w.key("samples").begin_array();
  for (const auto& s : sweep.samples) {
    w.begin_object();
    w.key("h").value(s.spacing).key("G").value(s.energy_G).key("g_ratio").value(s.g_ratio).key("solved").value(s.solved);
    if (s.solved) w.key("I").value(s.minimum_I).key("i_ratio").value(s.i_ratio);
    if (!s.flag.empty()) w.key("flag").value(s.flag);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string renormalized_energy_json(const RenormalizedEnergy& r) {
  JsonWriter w;
  w.begin_object();
  w.key("D").value(r.separation).key("plastic_radius").value(r.plastic_radius);
  w.key("F_self").value(r.self).key("F_int").value(r.interaction).key("F_elastic").value(r.elastic);
  w.key("F").value(r.total()).key("f").value(r.core).key("F_plus_f").value(r.constant());
  w.key("literal").begin_object().key("F_self").value(r.literal_self).key("F_int").value(r.literal_interaction).end_object();
  w.end_object();
  return w.str();
}

std::string dipole_integrals_json(const DipoleIntegrals& b) {
  JsonWriter w;
  const auto na = b.normalized_annulus(), nb = b.normalized_ball();
  w.begin_object();
  w.key("h").value(b.spacing).key("R").value(b.radius).key("scale").value(b.scale());
  w.key("annulus").value(std::span<const double>(b.annulus));
  w.key("ball").value(std::span<const double>(b.ball));
  w.key("normalized_annulus").value(std::span<const double>(na));
  w.key("normalized_ball").value(std::span<const double>(nb));
  w.key("limits").value(std::span<const double>(b.limits));
  w.end_object();
  return w.str();
}

}  // namespace airy
