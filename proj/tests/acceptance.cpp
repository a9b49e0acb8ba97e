// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "airy/asymptotics.hpp"
#include "airy/boundary.hpp"
#include "airy/closedform.hpp"
#include "airy/energy.hpp"
#include "airy/quadrature.hpp"
#include "airy/solver.hpp"

using namespace airy;

namespace {

constexpr double kPi = std::numbers::pi;
const ElasticConstants kSteel(1.0, 0.3);
const Circle kUnit{{0.0, 0.0}, 1.0};
const double kPlane = kSteel.plane_modulus();

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double relative_l2(const ScalarField& v, const std::function<double(Vec2)>& exact) {
  ScalarField diff(v.grid(), v.region()), ref(v.grid(), v.region());
  for (std::size_t k = 0; k < v.values().size(); ++k) {
    if (!std::isfinite(v.values()[k])) continue;
    const Vec2 p = v.grid().point(k);
    const double e = norm(p) < 1.0 ? exact(p) : 0.0;
    diff.values()[k] = std::pow(v.values()[k] - e, 2);
    ref.values()[k] = e * e;
  }
  return std::sqrt(integrate(diff).value / integrate(ref).value);
}

double slope(double coarse, double fine) { return std::log2(coarse / fine); }

double density(const Sym2& h) { return 0.5 * kSteel.compliance() * (h.norm2() - kSteel.poisson() * h.trace() * h.trace()); }

struct MeshErrors {
  double disclination_256 = 0.0, disclination_512 = 0.0;
  double core_value_256 = 0.0, core_value_512 = 0.0;
  double core_l2_256 = 0.0, core_l2_512 = 0.0;
};

void criterion_1(MeshErrors& mesh) {
  const double exact = -kPlane / (32.0 * kPi);
  // Closed form: G(v_R) by polar quadrature of the analytic Hessian plus the point charge.
  const auto g = integrate_nested(
      [](double r, double t) {
        return density(single_disclination_clamped_derivatives({r * std::cos(t), r * std::sin(t)}, 1.0, {0.0, 0.0}, 1.0, kSteel).hessian) * r;
      },
      0.0, 1.0, 0.0, 2.0 * kPi, {1e-13, 0.0, 4000});
  const double closed = g.value + single_disclination_clamped({0.0, 0.0}, 1.0, {0.0, 0.0}, 1.0, kSteel);
  const Disclination d{{0.0, 0.0}, 1.0};
  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport r512 = solve_clamped_disclination(std::span(&d, 1), kUnit, kSteel, 512);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const SolveReport r256 = solve_clamped_disclination(std::span(&d, 1), kUnit, kSteel, 256);
  mesh.disclination_512 = std::abs(r512.value() / exact - 1.0);
  mesh.disclination_256 = std::abs(r256.value() / exact - 1.0);
  const bool ok = mesh.disclination_512 < 1e-3 && seconds < 60.0 && std::abs(closed - exact) < 1e-12 && std::abs(exact + 0.0109309) < 1e-7;
  report(1, ok,
         fmt("single disclination I = %.10f vs %.10f, rel err %.3e (tol 1e-3) at 512 in %.1f s (limit 60 s); closed form off by %.1e (tol 1e-12)",
             r512.value(), exact, mesh.disclination_512, seconds, std::abs(closed - exact)));
}

void criterion_2(MeshErrors& mesh) {
  const double eps = 0.1, quoted = -0.0578286;
  const double formula = core_minimum(1.0, eps, 1.0, kSteel);
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const auto exact_field = [&](Vec2 p) { return dislocation_core_airy(p, d.burgers, d.site, eps, 1.0, kSteel); };
  const SolveReport r512 = solve_core_constrained(std::span(&d, 1), eps, kUnit, kSteel, 512);
  const SolveReport r256 = solve_core_constrained(std::span(&d, 1), eps, kUnit, kSteel, 256);
  mesh.core_value_512 = std::abs(r512.value() / formula - 1.0);
  mesh.core_value_256 = std::abs(r256.value() / formula - 1.0);
  mesh.core_l2_512 = relative_l2(r512.field, exact_field);
  mesh.core_l2_256 = relative_l2(r256.field, exact_field);
  const double vs_quoted = std::abs(r512.value() / quoted - 1.0);
  const bool ok = mesh.core_value_512 < 1e-3 && vs_quoted < 1e-3 && mesh.core_l2_512 < 2e-3;
  report(2, ok,
         fmt("core dislocation value %.10f: rel err %.3e vs closed form %.10f, %.3e vs quoted %.7f (tol 1e-3); L2 field err %.3e (tol 2e-3)",
             r512.value(), mesh.core_value_512, formula, vs_quoted, quoted, mesh.core_l2_512));
}

void criterion_3() {
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const Grid grid = Grid::covering(kUnit, 512);
  double worst = 0.0;
  std::string detail;
  for (const double eps : {0.05, 0.1, 0.2}) {
    const AiryFunction w = dislocation_plastic_field(std::span(&d, 1), eps, 1.0, kSteel, CoreBranch::AnnulusExtension);
    const double quad = airy_energy_G(w, grid, Region(kUnit, {{{0.0, 0.0}, eps}}), kSteel);
    const double closed = kPlane / (8.0 * kPi) * (std::log(1.0 / eps) - (1.0 - eps * eps) / (1.0 + eps * eps));
    const double err = std::abs(quad / closed - 1.0);
    worst = std::max(worst, err);
    detail += fmt(" eps=%.2f:%.2e", eps, err);
  }
  report(3, worst < 1e-3, fmt("annulus energy by grid quadrature vs closed form, rel err%s (tol 1e-3)", detail.c_str()));
}

void criterion_4() {
  const double limit = log_coefficient(1.0, kSteel);
  std::vector<double> ratios;
  for (const double h : {1e-2, 3e-3, 1e-3}) ratios.push_back(dipole_energy_G(1.0, h, 1.0, kSteel) / (h * h * std::log(1.0 / h)));
  const double err = std::abs(ratios.back() / limit - 1.0);
  const bool monotone = std::is_sorted(ratios.rbegin(), ratios.rend()) || std::is_sorted(ratios.begin(), ratios.end());
  report(4, err < 0.10 && monotone,
         fmt("dipole G/(h^2 log(R/h)) = %.6f, %.6f, %.6f for h = 1e-2, 3e-3, 1e-3; limit %.6f, rel err %.3e (tol 0.10), monotone %s", ratios[0],
             ratios[1], ratios[2], limit, err, monotone ? "yes" : "no"));
}

void criterion_5() {
  const DipoleIntegrals b = appendix_b_integrals(1e-3, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(b.normalized_annulus()[i] / b.limits[i] - 1.0));
  const double angular = std::abs(angular_factor() - kPi / 8.0);
  const auto n = b.normalized_annulus();
  report(5, worst < 0.05 && angular < 1e-12,
         fmt("normalized F1, F2, F3 = %.5f, %.5f, %.5f vs 4pi, pi/8, pi/2: worst rel err %.3e (tol 0.05); angular factor off by %.1e (tol 1e-12)", n[0],
             n[1], n[2], worst, angular));
}

void criterion_6() {
  const std::array<double, 3> eps{0.2, 0.1, 0.05};
  const std::vector<std::pair<std::string, std::vector<Dislocation>>> cases{
      {"one", {{{0.0, 0.0}, {0.0, 1.0}}}}, {"two", {{{-0.4, 0.0}, {0.0, 1.0}}, {{0.4, 0.0}, {0.0, -1.0}}}}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, ds] : cases) {
    const ExpansionFit fit = expansion_check(ds, kUnit, kSteel, eps, 512);
    ok = ok && fit.fitted && !fit.partial() && fit.slope_rel_err() < 0.03 && fit.constant_rel_err() < 0.05;
    detail += fmt(" %s: slope %.6f vs %.6f (rel %.2e), constant %.6f vs %.6f (rel %.2e);", name.c_str(), fit.slope, fit.analytic_slope,
                  fit.slope_rel_err(), fit.constant, fit.reference_constant, fit.constant_rel_err());
  }
  report(6, ok, "expansion fit at 512 (tol slope 0.03, constant 0.05):" + detail);
}

void criterion_7() {
  const std::array<double, 3> hs{0.04, 0.01, 0.0025};
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const ExpansionFit fit = diagonal_dipole_limit(std::span(&d, 1), kUnit, kSteel, hs, 512);
  const bool ok = fit.fitted && !fit.partial() && fit.slope_rel_err() < 0.05;
  report(7, ok,
         fmt("diagonal eps(h)=sqrt(h), h = 0.04, 0.01, 0.0025: values %.6f, %.6f, %.6f; slope %.6f vs %.6f, rel err %.2e (tol 0.05)", fit.values[0],
             fit.values[1], fit.values[2], fit.slope, fit.analytic_slope, fit.slope_rel_err()));
}

void criterion_8() {
  const BoundaryCurve curve = BoundaryCurve::circle(kUnit, 4096);
  bool ok = true;
  std::string detail;
  for (const auto& f : boundary_corpus(1.0, kSteel)) {
    const BoundaryClassification c = classify_boundary(f, curve, 1e-6, 1e-6);
    ok = ok && c.agree() && c.by_hessian == f.traction_free;
    detail += fmt(" %s:%s/%s", f.name.c_str(), c.by_hessian ? "free" : "loaded", c.by_trace ? "affine" : "non-affine");
  }
  report(8, ok, "boundary classification, tangential Hessian vs affine trace:" + detail);
}

void criterion_9() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0), young(0.5, 2.0), poisson(-0.5, 0.45), lam(0.0, 1.0);
  double identity = 0.0, roundtrip = 0.0, convexity = 0.0, superposition = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ElasticConstants c(young(rng), poisson(rng));
    const Sym2 strain{u(rng), u(rng), u(rng)};
    const Sym2 stress = strain_to_stress(strain, c);
    const double e = strain_energy_density(strain, c);
    identity = std::max(identity, std::abs(e - stress_energy_density(stress, c)) / std::max(1.0, e));
    const Sym2 back = stress_to_strain(stress, c);
    roundtrip = std::max({roundtrip, std::abs(back.xx - strain.xx), std::abs(back.xy - strain.xy), std::abs(back.yy - strain.yy)});

    const Sym2 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const double l = lam(rng);
    const auto g = [&](const Sym2& h) { return 0.5 * c.compliance() * (h.norm2() - c.poisson() * h.trace() * h.trace()); };
    const double lhs = g(l * a + (1 - l) * b);
    const double rhs = l * g(a) + (1 - l) * g(b) - l * (1 - l) * g(a + (-1.0) * b);
    convexity = std::max(convexity, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));

    std::vector<Disclination> ds;
    for (int k = 0; k < 3; ++k) ds.push_back({{0.5 * u(rng), 0.5 * u(rng)}, u(rng)});
    std::vector<Dislocation> dl;
    for (int k = 0; k < 2; ++k) dl.push_back({{0.3 * u(rng), 0.3 * u(rng)}, {u(rng), u(rng)}});
    const Vec2 x{0.9 * u(rng), 0.9 * u(rng)};
    const AiryFunction all = disclination_plastic_field(ds, c) + dislocation_limit_field(dl, 1.5, c);
    double sum = 0.0;
    for (const auto& d : ds) sum += disclination_plastic_field(std::span(&d, 1), c).value(x);
    for (const auto& d : dl) sum += dislocation_limit_airy(x, d.burgers, d.site, 1.5, c);
    superposition = std::max(superposition, std::abs(all.value(x) - sum) / std::max(1.0, std::abs(sum)));
  }
  const bool ok = identity <= 1e-12 && roundtrip <= 1e-12 && convexity <= 1e-12 && superposition <= 1e-12;
  report(9, ok,
         fmt("1000 random instances: energy identity %.1e, round trip %.1e, strict convexity %.1e, superposition %.1e (tol 1e-12)", identity,
             roundtrip, convexity, superposition));
}

void criterion_10(const MeshErrors& m) {
  const double s1 = slope(m.disclination_256, m.disclination_512), s2 = slope(m.core_value_256, m.core_value_512),
               s3 = slope(m.core_l2_256, m.core_l2_512);
  report(10, std::min({s1, s2, s3}) >= 1.8,
         fmt("log-log slopes 256->512: disclination value %.2f, core value %.2f, core L2 %.2f (min 1.8)", s1, s2, s3));
}

}  // namespace

int main() {
  MeshErrors mesh;
  const std::vector<std::pair<int, std::function<void()>>> criteria{
      {1, [&] { criterion_1(mesh); }}, {2, [&] { criterion_2(mesh); }}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
      {6, criterion_6},                {7, criterion_7},                {8, criterion_8}, {9, criterion_9}, {10, [&] { criterion_10(mesh); }}};
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
