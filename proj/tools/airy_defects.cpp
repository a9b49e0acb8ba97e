// Command-line front end: every subcommand validates its inputs, computes, and only then writes files.
#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "airy/asymptotics.hpp"
#include "airy/boundary.hpp"
#include "airy/closedform.hpp"
#include "airy/core.hpp"
#include "airy/energy.hpp"
#include "airy/fields.hpp"
#include "airy/json_writer.hpp"
#include "airy/solver.hpp"

namespace {

using namespace airy;

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

struct RunConfig {
  std::string config_path;
  int grid_n = 256;
  double tolerance = 1e-10;
  std::string solver = "direct";
  std::size_t fit_tail = 3;
  std::vector<double> eps;
  std::vector<double> h;
  std::optional<double> radius;
  std::string out;
};

// Artifacts are buffered and written together after all computation succeeded.
struct Artifacts {
  std::string json;
  std::map<std::string, std::string> files;  // suffix -> content
};

DefectConfiguration load_configuration(const RunConfig& run) {
  DefectConfiguration config;
  if (!run.config_path.empty()) {
    std::ifstream in(run.config_path);
    if (!in) throw ValidationError("cannot read config file " + run.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    config = configuration_from_json(buf.str());
  }
  if (run.radius) config.domain.radius = *run.radius;
  if (!run.eps.empty() && run.eps.size() == 1) config.core_radius = run.eps.front();
  config.validate();
  return config;
}

SolverOptions solver_options(const RunConfig& run) {
  SolverOptions o;
  o.method = run.solver == "direct" ? LinearSolver::Direct : LinearSolver::Iterative;
  o.tolerance = run.tolerance;
  return o;
}

void require_even_grid(int n) {
  if (n < 4 || n % 2 != 0) throw ValidationError("--grid-n must be an even integer >= 4");
}

// Scalar closed-form sum of every defect in the configuration; finite at the sites.
std::function<double(Vec2)> plastic_values(const DefectConfiguration& config) {
  const ElasticConstants c = config.constants();
  const double radius = plastic_radius(config.dislocations, config.domain);
  return [config, c, radius](Vec2 x) {
    double v = 0.0;
    for (const auto& d : config.disclinations) v += d.frank_angle * fundamental_airy(x - d.site, c);
    for (const auto& d : config.dipoles) v += dipole_airy(x, d, c);
    for (const auto& d : config.dislocations) {
      if (config.core_radius)
        v += dislocation_core_airy(x, d.burgers, d.site, *config.core_radius, radius, c);
      else if (!(x == d.site))
        v += dislocation_limit_airy(x, d.burgers, d.site, radius, c);
    }
    return v;
  };
}

AiryFunction plastic_function(const DefectConfiguration& config) {
  const ElasticConstants c = config.constants();
  AiryFunction f = disclination_plastic_field(config.disclinations, c);
  for (const auto& d : config.dipoles) f += AiryFunction([d, c](Vec2 x) { return dipole_airy_derivatives(x, d, c); });
  const double radius = plastic_radius(config.dislocations, config.domain);
  f += config.core_radius ? dislocation_plastic_field(config.dislocations, *config.core_radius, radius, c)
                          : dislocation_limit_field(config.dislocations, radius, c);
  return f;
}

// Removes a half-spacing disk around every point where the closed-form Hessian is singular.
Region singular_free_region(const DefectConfiguration& config, const Region& region, double spacing) {
  std::vector<Circle> holes(region.holes().begin(), region.holes().end());
  const auto add = [&](Vec2 p) {
    if (region.hole_containing(p) < 0) holes.push_back({p, 0.5 * spacing});
  };
  for (const auto& d : config.disclinations) add(d.site);
  for (const auto& d : config.dipoles) {
    add(d.positive_pole());
    add(d.negative_pole());
  }
  if (!config.core_radius)
    for (const auto& d : config.dislocations) add(d.site);
  return Region(region.outer(), holes);
}

Region configuration_region(const DefectConfiguration& config) {
  std::vector<Circle> holes;
  if (config.core_radius)
    for (Vec2 s : config.sites()) holes.push_back({s, *config.core_radius});
  return Region(config.domain, holes);
}

std::string constants_json(const DefectConfiguration& config) {
  const ElasticConstants c = config.constants();
  JsonWriter w;
  w.begin_object();
  w.key("E").value(c.young()).key("nu").value(c.poisson());
  w.key("lambda").value(c.lambda()).key("mu").value(c.mu());
  w.key("plane_modulus").value(c.plane_modulus()).key("compliance").value(c.compliance());
  w.key("log_coefficient_unit_burgers").value(log_coefficient(1.0, c));
  w.key("configuration").raw(configuration_to_json(config));
  w.end_object();
  return w.str();
}

Artifacts run_field(const RunConfig& run, bool energy_only) {
  const DefectConfiguration config = load_configuration(run);
  require_even_grid(run.grid_n);
  const Grid grid = Grid::covering(config.domain, run.grid_n);
  const Region region = configuration_region(config);
  // Sampled over the whole disk so core nodes carry the affine core values.
  const ScalarField whole = ScalarField::sample(grid, Region(config.domain), plastic_values(config));
  ScalarField v(grid, region);
  std::copy(whole.values().begin(), whole.values().end(), v.values().begin());
  Artifacts a;
  if (energy_only) {
    const ElasticConstants c = config.constants();
    const EnergyBreakdown e = (config.core_radius && !config.dislocations.empty())
                                  ? system_functional_I0(v, config.dislocations, *config.core_radius, c)
                                  : make_breakdown(airy_energy_G(v, c), 0.0, region.describe());
    a.json = energy_report_json(e, grid);
  } else {
    std::ostringstream csv, stress;
    write_field_csv(csv, v, hessian_fd(v, false));
    write_stress_csv(stress, plastic_function(config), grid, singular_free_region(config, region, grid.spacing()), config.constants());
    a.files[".csv"] = csv.str();
    a.files[".stress.csv"] = stress.str();
    JsonWriter w;
    w.begin_object().key("nodes").value(grid.size()).key("delta").value(grid.spacing()).key("region").value(region.describe());
    w.end_object();
    a.json = w.str();
  }
  return a;
}

Artifacts run_solve(const RunConfig& run) {
  const DefectConfiguration config = load_configuration(run);
  require_even_grid(run.grid_n);
  const ElasticConstants c = config.constants();
  const SolverOptions options = solver_options(run);
  const int kinds = !config.disclinations.empty() + !config.dislocations.empty() + !config.dipoles.empty();
  if (kinds != 1) throw ValidationError("solve: the configuration must hold exactly one kind of defect");
  std::optional<SolveReport> report;
  if (!config.disclinations.empty()) {
    report = solve_clamped_disclination(config.disclinations, config.domain, c, run.grid_n, options);
  } else if (!config.dislocations.empty()) {
    report = config.core_radius ? solve_core_constrained(config.dislocations, *config.core_radius, config.domain, c, run.grid_n, options)
                                : solve_elastic_correction(config.dislocations, config.domain, c, run.grid_n, options);
  } else {
    if (!config.core_radius) throw ValidationError("solve: dipoles need core_radius or --eps");
    report = solve_dipole_core(config.dipoles, *config.core_radius, config.domain, c, run.grid_n, options);
  }
  Artifacts a;
  a.json = solve_report_json(*report);
  std::ostringstream csv;
  write_field_csv(csv, report->field, hessian_fd(report->field, false));
  a.files[".csv"] = csv.str();
  return a;
}

std::string csv_of(std::span<const SweepRow> rows) {
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return out.str();
}

Artifacts run_sweep_dipole(const RunConfig& run) {
  const DefectConfiguration config = load_configuration(run);
  require_even_grid(run.grid_n);
  const std::vector<double> hs = run.h.empty() ? std::vector<double>{1e-2, 3e-3, 1e-3} : run.h;
  const double s = config.dipoles.empty() ? 1.0 : config.dipoles.front().charge();
  const DipoleSweep sweep = dipole_scaling_sweep(s, config.domain.radius, config.constants(), hs, run.grid_n, solver_options(run));
  Artifacts a;
  a.json = dipole_sweep_json(sweep);
  a.files[".csv"] = csv_of(sweep_rows(sweep));
  return a;
}

Artifacts run_sweep_core(const RunConfig& run, bool diagonal) {
  RunConfig copy = run;
  const std::vector<double> list = diagonal ? (run.h.empty() ? std::vector<double>{0.04, 0.01, 0.0025} : run.h)
                                            : (run.eps.empty() ? std::vector<double>{0.2, 0.1, 0.05} : run.eps);
  copy.eps.clear();
  const DefectConfiguration config = load_configuration(copy);
  require_even_grid(run.grid_n);
  if (run.fit_tail < 3) throw ValidationError("--fit-tail must be at least 3");
  std::vector<Dislocation> targets = config.dislocations;
  for (const auto& d : config.dipoles) targets.push_back(d.target());
  const double delta = Grid::covering(config.domain, run.grid_n).spacing();
  for (double p : list) {
    const double eps = diagonal && !targets.empty() ? diagonal_core_radius(p, min_separation(dislocation_sites(targets), config.domain)) : p;
    if (eps < 4.0 * delta)
      throw ValidationError("core radius " + format_double(eps) + " is below 4 grid spacings (" + format_double(4.0 * delta) +
                            "); raise --grid-n");
  }
  const ExpansionFit fit = diagonal ? diagonal_dipole_limit(targets, config.domain, config.constants(), list, run.grid_n, run.fit_tail,
                                                            solver_options(run))
                                    : expansion_check(targets, config.domain, config.constants(), list, run.grid_n, run.fit_tail,
                                                      solver_options(run));
  Artifacts a;
  a.json = expansion_fit_json(fit);
  a.files[".csv"] = csv_of(sweep_rows(fit));
  return a;
}

Artifacts run_renormalize(const RunConfig& run) {
  const DefectConfiguration config = load_configuration(run);
  require_even_grid(run.grid_n);
  Artifacts a;
  a.json = renormalized_energy_json(
      renormalized_energy(config.dislocations, config.domain, config.constants(), run.grid_n, config.core_radius, solver_options(run)));
  return a;
}

Artifacts run_check_bc(const RunConfig& run) {
  const DefectConfiguration config = load_configuration(run);
  const BoundaryCurve curve = BoundaryCurve::circle({{0.0, 0.0}, config.domain.radius});
  std::vector<BoundaryClassification> rows;
  for (const auto& f : boundary_corpus(config.domain.radius, config.constants())) rows.push_back(classify_boundary(f, curve));
  Artifacts a;
  a.json = boundary_report_json(rows);
  return a;
}

Artifacts run_appendix_b(const RunConfig& run) {
  const double h = run.h.empty() ? 1e-3 : run.h.front();
  if (run.h.size() > 1) throw ValidationError("appendix-b takes a single --h");
  const DipoleIntegrals b = appendix_b_integrals(h, run.radius.value_or(1.0));
  Artifacts a;
  JsonWriter w;
  w.begin_object().key("integrals").raw(dipole_integrals_json(b)).key("angular_factor").value(angular_factor()).end_object();
  a.json = w.str();
  return a;
}

void write_artifacts(const Artifacts& a, const std::string& out) {
  std::cout << a.json << '\n';
  if (out.empty()) return;
  std::map<std::string, std::string> files = a.files;
  files[".json"] = a.json + "\n";
  for (const auto& [suffix, content] : files) {
    std::ofstream f(out + suffix, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + out + suffix);
    f << content;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airy-potential energies of disclinations and dislocations in planar elastic disks"};
  app.require_subcommand(1, 1);
  // -h is taken by the dipole spacing.
  app.set_help_flag("--help", "print this help and exit");
  RunConfig run;
  std::string h_list, eps_list;
  double radius = 0.0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "JSON defect configuration (E, nu, domain, defects, core_radius)");
    sub->add_option("--grid-n", run.grid_n, "grid cells across the domain diameter (even)");
    sub->add_option("--tol", run.tolerance, "iterative tolerance and residual acceptance bound");
    sub->add_option("--solver", run.solver, "linear solver")->check(CLI::IsMember({"direct", "cg"}));
    sub->add_option("--fit-tail", run.fit_tail, "samples used by the expansion fit");
    sub->add_option("--eps", eps_list, "core radius, or comma-separated list for sweeps");
    sub->add_option("--h", h_list, "dipole spacing, or comma-separated list for sweeps");
    sub->add_option("--R", radius, "domain radius (overrides the config)");
    sub->add_option("--out", run.out, "output path prefix for .json/.csv artifacts");
  };
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"constants", "field", "energy", "solve", "sweep-dipole", "sweep-core", "renormalize", "diagonal",
                           "check-bc", "appendix-b"}) {
    subs[name] = app.add_subcommand(name);
    add_common(subs[name]);
  }
  subs["constants"]->description("elastic constants and the parsed configuration");
  subs["field"]->description("closed-form plastic field on the grid: values with FD Hessians, and analytic stress/strain");
  subs["energy"]->description("energy of the closed-form plastic field");
  subs["solve"]->description("discrete minimizer for the configured defects");
  subs["sweep-dipole"]->description("dipole energy scaling G/(h^2 log(R/h)) over --h");
  subs["sweep-core"]->description("core-radius expansion fit over --eps");
  subs["renormalize"]->description("renormalized energy decomposition");
  subs["diagonal"]->description("dipole energies along eps(h) = sqrt(h) over --h");
  subs["check-bc"]->description("traction-free versus affine-trace classification on the field corpus");
  subs["appendix-b"]->description("normalized dipole integrals on the annulus A_{h,R} and the ball B_h");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kUsage;
  }

  const auto parse_list = [](const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() || !std::isfinite(v))
        throw ValidationError(std::string(flag) + ": not a number: '" + item + "'");
      out.push_back(v);
    }
    return out;
  };

  try {
    if (!h_list.empty()) run.h = parse_list(h_list, "--h");
    if (!eps_list.empty()) run.eps = parse_list(eps_list, "--eps");
    if (radius != 0.0) run.radius = radius;
    if (!(run.tolerance > 0.0)) throw ValidationError("--tol must be positive");
    const std::string name = app.get_subcommands().front()->get_name();
    if (name != "sweep-core" && run.eps.size() > 1) throw ValidationError("--eps takes a single value for " + name);
    Artifacts a;
    if (name == "constants") a.json = constants_json(load_configuration(run));
    else if (name == "field") a = run_field(run, false);
    else if (name == "energy") a = run_field(run, true);
    else if (name == "solve") a = run_solve(run);
    else if (name == "sweep-dipole") a = run_sweep_dipole(run);
    else if (name == "sweep-core") a = run_sweep_core(run, false);
    else if (name == "renormalize") a = run_renormalize(run);
    else if (name == "diagonal") a = run_sweep_core(run, true);
    else if (name == "check-bc") a = run_check_bc(run);
    else a = run_appendix_b(run);
    write_artifacts(a, run.out);
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
