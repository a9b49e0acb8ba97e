#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "airy/asymptotics.hpp"
#include "airy/closedform.hpp"

using namespace airy;

namespace {

constexpr double kPi = std::numbers::pi;
const ElasticConstants kSteel(1.0, 0.3);
const Circle kUnit{{0.0, 0.0}, 1.0};

double loglog_slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

bool monotone(std::span<const double> v) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] >= v[i - 1];
    down = down && v[i] <= v[i - 1];
  }
  return up || down;
}

}  // namespace

TEST(LogCoefficient, ReferenceValue) {
  EXPECT_NEAR(log_coefficient(1.0, kSteel), 1.0 / (0.91 * 8.0 * kPi), 1e-16);
  EXPECT_NEAR(log_coefficient(1.0, kSteel), 0.0437238855, 1e-10);
  EXPECT_EQ(log_coefficient(0.0, kSteel), 0.0);
}

TEST(DipoleScaling, RatioApproachesTheLimitMonotonically) {
  const std::array<double, 3> hs{1e-2, 3e-3, 1e-3};
  const DipoleSweep sweep = dipole_scaling_sweep(1.0, 1.0, kSteel, hs, 64);
  std::vector<double> ratios;
  for (const auto& s : sweep.samples) {
    ratios.push_back(s.g_ratio);
    EXPECT_FALSE(s.solved);
    EXPECT_FALSE(s.flag.empty());
  }
  EXPECT_LT(std::abs(ratios.back() / sweep.g_limit - 1.0), 0.10);
  EXPECT_TRUE(std::is_sorted(ratios.rbegin(), ratios.rend()));
  EXPECT_GT(ratios.back(), sweep.g_limit);
}

TEST(DipoleScaling, ZeroChargeGivesZeroRatios) {
  const std::array<double, 2> hs{0.2, 0.1};
  const DipoleSweep sweep = dipole_scaling_sweep(0.0, 1.0, kSteel, hs, 64);
  for (const auto& s : sweep.samples) {
    EXPECT_EQ(s.g_ratio, 0.0);
    EXPECT_EQ(s.i_ratio, 0.0);
  }
}

TEST(DipoleScaling, SolverColumnIsNegativeAndFlagsUnresolvedSpacings) {
  const std::array<double, 2> hs{0.2, 0.01};
  const DipoleSweep sweep = dipole_scaling_sweep(1.0, 1.0, kSteel, hs, 128);
  EXPECT_TRUE(sweep.samples[0].solved);
  EXPECT_LT(sweep.samples[0].minimum_I, 0.0);
  EXPECT_FALSE(sweep.samples[1].solved);
  const std::array<double, 2> rising{0.1, 0.2};
  EXPECT_THROW(dipole_scaling_sweep(1.0, 1.0, kSteel, rising, 64), ValidationError);
}

TEST(DipoleScaling, EnergyOnFixedAnnulusScalesQuadratically) {
  // G(v̄_h; A_{1/2,1}) by polar quadrature of the analytic Hessian.
  const auto annulus_energy = [](double h) {
    const DisclinationDipole d{{0.0, 0.0}, {0.0, 1.0}, h};
    const auto density = [&](double r, double t) {
      const Sym2 hs = dipole_airy_derivatives({r * std::cos(t), r * std::sin(t)}, d, kSteel).hessian;
      return 0.5 * kSteel.compliance() * (hs.norm2() - kSteel.poisson() * hs.trace() * hs.trace()) * r;
    };
    return integrate_nested(density, 0.5, 1.0, 0.0, 2.0 * kPi).value;
  };
  const double slope = loglog_slope(1e-2, annulus_energy(1e-2), 2.5e-3, annulus_energy(2.5e-3));
  EXPECT_NEAR(slope, 2.0, 0.05);
}

TEST(DipoleIntegrals, NormalizedAnnulusIntegralsTendToTheirLimits) {
  std::array<std::vector<double>, 3> normalized;
  std::vector<double> ball;
  for (const double h : {1e-2, 3e-3, 1e-3}) {
    const DipoleIntegrals b = appendix_b_integrals(h, 1.0);
    EXPECT_DOUBLE_EQ(b.limits[0], 4.0 * kPi);
    EXPECT_DOUBLE_EQ(b.limits[1], kPi / 8.0);
    EXPECT_DOUBLE_EQ(b.limits[2], kPi / 2.0);
    EXPECT_GE(b.annulus[0], 0.0);
    EXPECT_GE(b.ball[0], 0.0);
    for (int i = 0; i < 3; ++i) normalized[i].push_back(b.normalized_annulus()[i] / b.limits[i]);
    ball.push_back(b.normalized_ball()[0]);
  }
  EXPECT_LT(std::abs(normalized[1].back() - 1.0), 0.05);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(std::abs(normalized[i].back() - 1.0), 0.05) << i;
    EXPECT_TRUE(monotone(normalized[i])) << i;
  }
  EXPECT_TRUE(std::is_sorted(ball.rbegin(), ball.rend()));
  EXPECT_THROW(appendix_b_integrals(2.0, 1.0), ValidationError);
}

TEST(DipoleIntegrals, AngularFactor) { EXPECT_NEAR(angular_factor(), kPi / 8.0, 1e-12); }

TEST(AnnulusClosedForm, FullRadiusAndZeroCharge) {
  const double eps = 0.1;
  const AnnulusClosedForm a = annulus_energy_closed_form(1.0, eps, 1.0, 1.0, kSteel);
  EXPECT_NEAR(a.energy_G, kSteel.plane_modulus() / (8 * kPi) * (std::log(1.0 / eps) - 0.99 / 1.01), 1e-15);
  EXPECT_NEAR(core_minimum(1.0, eps, 1.0, kSteel), -a.energy_G, 1e-16);
  const AnnulusClosedForm z = annulus_energy_closed_form(0.0, eps, 0.5, 1.0, kSteel);
  EXPECT_EQ(z.energy_G, 0.0);
  EXPECT_EQ(z.combined, 0.0);
  EXPECT_EQ(z.f_eps, 0.0);
  EXPECT_THROW(annulus_energy_closed_form(1.0, 0.6, 0.5, 1.0, kSteel), ValidationError);
  EXPECT_THROW(annulus_energy_closed_form(1.0, 0.1, 1.5, 1.0, kSteel), ValidationError);
}

TEST(AnnulusClosedForm, CombinedValueAddsTheCoreCharge) {
  // The charge of the core field is -2 G(A_{ε,R}) whatever the inner radius r of the energy region.
  const double eps = 0.05;
  const double charge = -2.0 * annulus_energy_closed_form(1.0, eps, 1.0, 1.0, kSteel).energy_G;
  for (const double r : {0.3, 0.6, 1.0}) {
    const AnnulusClosedForm a = annulus_energy_closed_form(1.0, eps, r, 1.0, kSteel);
    EXPECT_NEAR(a.combined, a.energy_G + charge, 1e-14);
  }
}

TEST(AnnulusClosedForm, QuadratureOfThePartialAnnulus) {
  const double eps = 0.1, r = 0.6;
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const AiryFunction w = dislocation_plastic_field(std::span(&d, 1), eps, 1.0, kSteel, CoreBranch::AnnulusExtension);
  const auto density = [&](double rho, double t) {
    const Sym2 h = w.hessian({rho * std::cos(t), rho * std::sin(t)});
    return 0.5 * kSteel.compliance() * (h.norm2() - kSteel.poisson() * h.trace() * h.trace()) * rho;
  };
  const double quad = integrate_nested(density, eps, r, 0.0, 2 * kPi).value;
  EXPECT_NEAR(annulus_energy_closed_form(1.0, eps, r, 1.0, kSteel).energy_G / quad, 1.0, 1e-9);
}

TEST(AnnulusClosedForm, RemainderConvergesAtSecondOrder) {
  const double r = 0.5;
  const double limit = core_remainder_limit(1.0, r, 1.0, kSteel);
  const double e1 = std::abs(core_remainder(1.0, 0.02, r, 1.0, kSteel) - limit);
  const double e2 = std::abs(core_remainder(1.0, 0.01, r, 1.0, kSteel) - limit);
  EXPECT_NEAR(loglog_slope(0.02, e1, 0.01, e2), 2.0, 0.2);
}

TEST(Renormalized, SingleCenteredDislocation) {
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const RenormalizedEnergy r = renormalized_energy(std::span(&d, 1), kUnit, kSteel, 128);
  EXPECT_EQ(r.interaction, 0.0);
  EXPECT_NEAR(r.elastic, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.separation, 1.0);
  // W_0 with R = 1 on the annulus A_{D,1}: at D = 1 the self term is the log term at log 1 = 0.
  EXPECT_NEAR(r.self, 0.0, 1e-12);
  EXPECT_NEAR(r.constant(), core_remainder_limit(1.0, 1.0, 1.0, kSteel), 1e-12);
}

TEST(Renormalized, SelfPlusCoreIsIndependentOfD) {
  const std::array<Dislocation, 2> ds{Dislocation{{-0.4, 0.0}, {0.0, 1.0}}, Dislocation{{0.4, 0.0}, {0.0, -1.0}}};
  const RenormalizedEnergy a = renormalized_energy(ds, kUnit, kSteel, 64, 0.4);
  const RenormalizedEnergy b = renormalized_energy(ds, kUnit, kSteel, 64, 0.2);
  EXPECT_NEAR(a.self + a.core, b.self + b.core, 1e-6 * std::abs(a.self + a.core));
  EXPECT_NEAR(a.interaction, b.interaction, 1e-14);
  EXPECT_THROW(renormalized_energy(ds, kUnit, kSteel, 64, 0.7), ValidationError);
}

TEST(Renormalized, RelabelingInvariance) {
  const std::array<Dislocation, 3> ds{Dislocation{{-0.4, 0.1}, {0.0, 1.0}}, Dislocation{{0.35, 0.0}, {0.6, -0.8}},
                                      Dislocation{{0.0, -0.4}, {1.0, 0.0}}};
  const std::array<Dislocation, 3> swapped{ds[2], ds[0], ds[1]};
  const RenormalizedEnergy a = renormalized_energy(ds, kUnit, kSteel, 128);
  const RenormalizedEnergy b = renormalized_energy(swapped, kUnit, kSteel, 128);
  EXPECT_NEAR(a.interaction, b.interaction, 1e-13);
  EXPECT_NEAR(a.self, b.self, 1e-13);
  EXPECT_NEAR(a.total(), b.total(), 1e-9 * std::abs(a.total()));
}

TEST(Renormalized, EqualPairInteractionIsSymmetric) {
  const std::array<Dislocation, 2> ds{Dislocation{{-0.3, 0.0}, {0.0, 1.0}}, Dislocation{{0.3, 0.0}, {0.0, 1.0}}};
  const std::array<Dislocation, 2> swapped{ds[1], ds[0]};
  const RenormalizedEnergy a = renormalized_energy(ds, kUnit, kSteel, 64);
  const RenormalizedEnergy b = renormalized_energy(swapped, kUnit, kSteel, 64);
  EXPECT_NEAR(a.interaction, b.interaction, 1e-14);
  EXPECT_NEAR(a.literal_interaction, b.literal_interaction, 1e-14);
}

TEST(Fit, RecoversAnExactLine) {
  const std::array<double, 4> eps{0.4, 0.2, 0.1, 0.05};
  std::array<double, 4> values{}, corr{};
  for (int i = 0; i < 4; ++i) {
    corr[i] = 0.01 * eps[i] * eps[i];
    values[i] = -0.5 * std::abs(std::log(eps[i])) + 0.25 + corr[i];
  }
  const ExpansionFit fit = fit_expansion(eps, values, corr, 3);
  EXPECT_TRUE(fit.fitted);
  EXPECT_NEAR(fit.slope, -0.5, 1e-13);
  EXPECT_NEAR(fit.constant, 0.25, 1e-13);
  EXPECT_EQ(fit.residuals.size(), 3u);
  EXPECT_NEAR(fit.slope_se, 0.0, 1e-12);
  EXPECT_NE(fit.raw_slope, fit.slope);
}

TEST(Fit, NoisyDataConfidenceIntervals) {
  const std::array<double, 5> eps{0.4, 0.2, 0.1, 0.05, 0.025};
  const std::array<double, 5> noise{0.001, -0.002, 0.0015, -0.0005, 0.001};
  std::array<double, 5> values{}, corr{};
  for (int i = 0; i < 5; ++i) values[i] = -0.5 * std::abs(std::log(eps[i])) + 0.25 + noise[i];
  const ExpansionFit fit = fit_expansion(eps, values, corr, 5);
  EXPECT_GT(fit.slope_ci, fit.slope_se);
  EXPECT_LT(std::abs(fit.slope + 0.5), fit.slope_ci);
}

TEST(Fit, Validation) {
  const std::array<double, 2> two{0.2, 0.1};
  EXPECT_THROW(fit_expansion(two, two, two, 3), ValidationError);
  const std::array<double, 3> rising{0.1, 0.2, 0.3}, z{0.0, 0.0, 0.0};
  EXPECT_THROW(fit_expansion(rising, z, z, 3), ValidationError);
  const std::array<double, 3> ok{0.3, 0.2, 0.1};
  EXPECT_THROW(fit_expansion(ok, z, z, 2), ValidationError);
}

TEST(Expansion, EmptyConfigurationHasNoFit) {
  const std::array<double, 3> eps{0.2, 0.1, 0.05};
  const ExpansionFit fit = expansion_check({}, kUnit, kSteel, eps, 64);
  EXPECT_FALSE(fit.fitted);
  for (double v : fit.values) EXPECT_EQ(v, 0.0);
  const ExpansionFit diag = diagonal_dipole_limit({}, kUnit, kSteel, std::array<double, 3>{0.04, 0.01, 0.0025}, 64);
  EXPECT_FALSE(diag.fitted);
  for (double v : diag.values) EXPECT_EQ(v, 0.0);
}

TEST(Expansion, SingleDislocationSlope) {
  const std::array<double, 3> eps{0.2, 0.1, 0.05};
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  const ExpansionFit fit = expansion_check(std::span(&d, 1), kUnit, kSteel, eps, 256);
  ASSERT_TRUE(fit.fitted);
  EXPECT_FALSE(fit.partial());
  EXPECT_NEAR(fit.analytic_slope, -0.0437238855, 1e-10);
  EXPECT_LT(fit.slope_rel_err(), 0.03);
  EXPECT_LT(fit.constant_rel_err(), 0.05);
}

TEST(Diagonal, CoreRadiusRule) {
  EXPECT_DOUBLE_EQ(diagonal_core_radius(0.01, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(diagonal_core_radius(0.25, 0.3), 0.27);
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  EXPECT_THROW(diagonal_dipole_limit(std::span(&d, 1), kUnit, kSteel, std::array<double, 3>{0.95, 0.5, 0.1}, 64), ValidationError);
}

TEST(Diagonal, FixedSpacingValuesRiseWithTheCoreRadius) {
  // Larger cores constrain more of the field to be affine, so the minimum increases with ε.
  const double h = 0.02;
  const Dislocation d{{0.0, 0.0}, {0.0, 1.0}};
  std::vector<double> values;
  for (const double eps : {0.1, 0.2, 0.4, 0.8}) {
    const DisclinationDipole dip{d.site, d.burgers, h};
    values.push_back(solve_dipole_core(std::span(&dip, 1), eps, kUnit, kSteel, 128).value());
    EXPECT_TRUE(std::isfinite(values.back()));
  }
  EXPECT_TRUE(std::is_sorted(values.begin(), values.end()));
}

TEST(Output, SweepCsvAndJson) {
  const std::array<double, 3> hs{1e-2, 3e-3, 1e-3};
  const DipoleSweep sweep = dipole_scaling_sweep(1.0, 1.0, kSteel, hs, 32);
  std::ostringstream csv;
  write_sweep_csv(csv, sweep_rows(sweep));
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  EXPECT_EQ(header, "param,value,normalized,analytic_limit,rel_err");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 3);
  const std::string json = dipole_sweep_json(sweep);
  EXPECT_NE(json.find("\"samples\""), std::string::npos);
  EXPECT_NE(dipole_integrals_json(appendix_b_integrals(1e-2, 1.0)).find("\"normalized_annulus\""), std::string::npos);
}
