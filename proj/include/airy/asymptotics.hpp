#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airy/core.hpp"
#include "airy/quadrature.hpp"
#include "airy/solver.hpp"

namespace airy {

// E/(1-ν²) Σ|b|²/(8π): the |log ε| coefficient of the core energy, and the dipole scaling limit.
double log_coefficient(double burgers_norm2_sum, const ElasticConstants& c);

// G of the dipole potential with charge s and spacing h on B_R, by adaptive polar quadrature of the
// analytic Hessian (annulus A_{h,R} in log radius, and the ball B_h split at the poles).
double dipole_energy_G(double s, double h, double radius, const ElasticConstants& c, const QuadratureOptions& options = {});

struct DipoleSample {
  double spacing = 0.0;
  double energy_G = 0.0;
  double g_ratio = 0.0;  // G / (h² log(R/h))
  bool solved = false;
  double minimum_I = 0.0;
  double i_ratio = 0.0;  // I / (h² |log h|)
  std::string flag;      // why the solver column is missing
};

struct DipoleSweep {
  double g_limit = 0.0;
  double i_limit = 0.0;
  std::vector<DipoleSample> samples;
};

// h-list strictly decreasing inside (0, R). Samples with h < 4Δ skip the solver and carry a flag.
DipoleSweep dipole_scaling_sweep(double s, double radius, const ElasticConstants& c, std::span<const double> spacings, int grid_n,
                                 const SolverOptions& options = {});

struct DipoleIntegrals {
  double spacing = 0.0;
  double radius = 0.0;
  std::array<double, 3> annulus{};  // F¹, F², F³ on A_{h,R}
  std::array<double, 3> ball{};     // on B_h
  std::array<double, 3> limits{};   // 4π, π/8, π/2

  double scale() const;  // h² log(R/h)
  std::array<double, 3> normalized_annulus() const;
  std::array<double, 3> normalized_ball() const;
};

DipoleIntegrals appendix_b_integrals(double h, double radius, const QuadratureOptions& options = {});

// ∮ sin⁴θ cos²θ dθ by adaptive quadrature.
double angular_factor();

struct AnnulusClosedForm {
  double energy_G = 0.0;  // G(W_{0,ε}; A_{ε,r}) for the core field of radius R
  double combined = 0.0;  // -(k) log(1/ε) + (k) log r + f_ε(r, R)
  double f_eps = 0.0;
  double f_limit = 0.0;  // f(r, R), the ε -> 0 limit of f_ε
};

AnnulusClosedForm annulus_energy_closed_form(double s, double eps, double r, double radius, const ElasticConstants& c);
double core_remainder(double s2, double eps, double r, double radius, const ElasticConstants& c);
double core_remainder_limit(double s2, double r, double radius, const ElasticConstants& c);
// Minimum of the core functional for a centered dislocation: -G on A_{ε,R}.
double core_minimum(double s, double eps, double radius, const ElasticConstants& c);

struct RenormalizedEnergy {
  double separation = 0.0;      // D
  double plastic_radius = 0.0;  // R of the limit fields
  double self = 0.0;
  double interaction = 0.0;
  double elastic = 0.0;
  double core = 0.0;  // f(D, R; α)
  // Literal transcription: all D-balls removed from the self term, no 1/2 and no point terms in the interaction.
  double literal_self = 0.0;
  double literal_interaction = 0.0;

  double total() const { return self + interaction + elastic; }
  double constant() const { return total() + core; }
};

RenormalizedEnergy renormalized_energy(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                                       int grid_n, std::optional<double> separation = {}, const SolverOptions& options = {},
                                       int n_quad = 512);

struct ExpansionFit {
  std::vector<double> eps;
  std::vector<double> values;
  std::vector<double> corrections;  // Σ_j (f_ε - f)(D, R; b_j), subtracted before the fit
  std::size_t tail = 3;
  bool fitted = false;
  double slope = 0.0;
  double constant = 0.0;
  double slope_se = 0.0;
  double constant_se = 0.0;
  double slope_ci = 0.0;  // 95% half-widths
  double constant_ci = 0.0;
  std::vector<double> residuals;
  double raw_slope = 0.0;
  double raw_constant = 0.0;
  double analytic_slope = 0.0;
  double reference_constant = 0.0;
  std::vector<std::string> failures;

  bool partial() const { return !failures.empty(); }
  double slope_rel_err() const;
  double constant_rel_err() const;
};

// Least squares of value - correction against |log ε| over the last `tail` samples.
// Requires at least 3 samples with ε strictly decreasing and tail >= 3.
ExpansionFit fit_expansion(std::span<const double> eps, std::span<const double> values, std::span<const double> corrections,
                           std::size_t tail = 3);

ExpansionFit expansion_check(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                             std::span<const double> eps, int grid_n, std::size_t tail = 3, const SolverOptions& options = {});

// ε(h) = √h, clipped to 0.9 D; each h is solved with solve_dipole_core.
double diagonal_core_radius(double h, double separation);
ExpansionFit diagonal_dipole_limit(std::span<const Dislocation> targets, const Circle& domain, const ElasticConstants& c,
                                   std::span<const double> spacings, int grid_n, std::size_t tail = 3,
                                   const SolverOptions& options = {});

struct SweepRow {
  double param = 0.0;
  double value = 0.0;
  double normalized = 0.0;
  double analytic_limit = 0.0;
  double rel_err = 0.0;
};

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> sweep_rows(const DipoleSweep& sweep);
std::vector<SweepRow> sweep_rows(const ExpansionFit& fit);
std::string expansion_fit_json(const ExpansionFit& fit);
std::string dipole_sweep_json(const DipoleSweep& sweep);
std::string renormalized_energy_json(const RenormalizedEnergy& r);
std::string dipole_integrals_json(const DipoleIntegrals& b);

}  // namespace airy
