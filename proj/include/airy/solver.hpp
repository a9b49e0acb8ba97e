#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "airy/core.hpp"
#include "airy/energy.hpp"
#include "airy/fields.hpp"

namespace airy {

enum class LinearSolver { Direct, Iterative };

struct SolverOptions {
  LinearSolver method = LinearSolver::Direct;
  // Relative residual target of the iterative path; also the acceptance bound for the direct path residual.
  double tolerance = 1e-10;
  int max_iterations = 20000;
};

struct SolveTimings {
  double assembly = 0.0;
  double factorization = 0.0;
  double solve = 0.0;
};

// Quadratic model I(a) = aᵀ Q a + lᵀ a + constant over the 3 affine parameters per core
// (value, slope x, slope y, relative to the core site).
struct ReducedProblem {
  Eigen::MatrixXd quadratic;
  Eigen::VectorXd linear;
  Eigen::VectorXd parameters;

  Eigen::VectorXd gradient() const { return 2.0 * quadratic * parameters + linear; }
};

struct SolveReport {
  ScalarField field;
  EnergyBreakdown energy;
  // ‖K z - f‖ / ‖f‖ of the collocation system (0 when f = 0).
  double residual = 0.0;
  std::string method;
  double rcond = 0.0;
  long iterations = 0;
  std::size_t unknowns = 0;
  ReducedProblem reduced;
  SolveTimings timings;

  double value() const { return energy.total; }
};

std::string solve_report_json(const SolveReport& report);

// Clamped minimizer of G(v) + Σ s_k v(y_k) on the disk, by 13-point collocation with ghost nodes.
SolveReport solve_clamped_disclination(std::span<const Disclination> disclinations, const Circle& domain,
                                       const ElasticConstants& c, int grid_n, const SolverOptions& options = {});

// Clamped minimizer of I_0 over fields affine in each ε-core; 3 parameters per core minimize the discrete energy.
SolveReport solve_core_constrained(std::span<const Dislocation> dislocations, double eps, const Circle& domain,
                                   const ElasticConstants& c, int grid_n, const SolverOptions& options = {});

// Minimizer of the dipole-system functional over core-affine clamped fields. The charge term is evaluated by
// circle quadrature of difference quotients of the core affine functions.
SolveReport solve_dipole_core(std::span<const DisclinationDipole> dipoles, double eps, const Circle& domain,
                              const ElasticConstants& c, int grid_n, const SolverOptions& options = {});

// Radius of the ball centered at each site that contains the domain for every site: R + max |x_j - center|.
double plastic_radius(std::span<const Dislocation> dislocations, const Circle& domain);

// Biharmonic w with w = -W_0, ∂_n w = -∂_n W_0 on the boundary (W_0 the sum of limit fields with plastic_radius).
// energy.bulk_G = G(w), energy.charge = -Σ_{j,k} B_jk over the boundary, energy.total = the elastic part F_elastic.
SolveReport solve_elastic_correction(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                                     int grid_n, const SolverOptions& options = {});

}  // namespace airy
