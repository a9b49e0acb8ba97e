#include "airy/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "airy/json_writer.hpp"
#include "airy/sparse_lu.hpp"

namespace airy {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Nodes closer than this (in spacings) to the boundary are ghosts rather than unknowns.
constexpr double kActiveThreshold = 0.5;
// Ghost band: the node set carries values for d > -kBand spacings.
constexpr double kBand = 2.5;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 13-point Δ²: offsets and weights, divided by Δ⁴.
struct StencilEntry {
  int di;
  int dj;
  double w;
};
constexpr std::array<StencilEntry, 13> kBilaplacian{{{0, 0, 20.0},
                                                      {1, 0, -8.0},
                                                      {-1, 0, -8.0},
                                                      {0, 1, -8.0},
                                                      {0, -1, -8.0},
                                                      {1, 1, 2.0},
                                                      {1, -1, 2.0},
                                                      {-1, 1, 2.0},
                                                      {-1, -1, 2.0},
                                                      {2, 0, 1.0},
                                                      {-2, 0, 1.0},
                                                      {0, 2, 1.0},
                                                      {0, -2, 1.0}}};

// Boundary data of the outer circle at a ghost's foot point: value and derivative along the ghost axis.
struct TraceData {
  double value = 0.0;
  double axis_derivative = 0.0;
};

// A ghost value is g + g'·τ0 + A τ0² + B τ0³ where the cubic matches the boundary data (g, g') at the
// crossing and the next two unknowns along the grid axis closest to the normal.
struct Ghost {
  std::size_t slot = 0;
  int component = -1;
  std::array<int, 2> active{};
  std::array<double, 2> weight{};
  double value_coeff = 0.0;       // multiplies g
  double derivative_coeff = 0.0;  // multiplies g'
  Vec2 foot;
  Vec2 axis;
};

class Discretization {
 public:
  Discretization(const Grid& grid, const Region& region, const ElasticConstants& c);

  const Grid& grid() const { return grid_; }
  const Region& region() const { return region_; }
  std::size_t active_count() const { return active_nodes_.size(); }
  std::size_t slot_count() const { return slot_nodes_.size(); }
  std::size_t core_parameters() const { return 3 * region_.holes().size(); }
  int active_of(std::size_t node) const { return active_of_node_[node]; }

  // Scaled Δ² rows at unknowns, columns over the node set.
  const SparseMatrix& operator_rows() const { return rows_; }
  const SparseMatrix& active_map() const { return p_active_; }
  const SparseMatrix& core_map() const { return p_core_; }
  // Node-set values contributed by outer boundary data.
  Eigen::VectorXd outer_offset(const std::function<TraceData(Vec2 foot, Vec2 axis)>& data) const;

  // Discrete energy (1/2)(1+ν)/E Σ w |Hessian|² on node-set vectors.
  double energy(const Eigen::VectorXd& slots) const;
  // Nodal Hessians at the quadrature nodes, for bilinear forms.
  std::vector<Sym2> quadrature_hessians(const Eigen::VectorXd& slots) const;
  double bilinear(const std::vector<Sym2>& a, const std::vector<Sym2>& b) const;

  ScalarField to_field(const Eigen::VectorXd& slots, std::span<const double> core_params) const;

 private:
  Grid grid_;
  Region region_;
  ElasticConstants constants_;
  std::vector<int> active_of_node_;
  std::vector<int> slot_of_node_;
  std::vector<std::size_t> active_nodes_;
  std::vector<std::size_t> slot_nodes_;
  std::vector<Ghost> ghosts_;
  SparseMatrix rows_;
  SparseMatrix p_active_;
  SparseMatrix p_core_;
  std::vector<std::size_t> quad_nodes_;
  std::vector<double> quad_weights_;
  std::vector<std::array<int, 9>> quad_stencils_;
};

Discretization::Discretization(const Grid& grid, const Region& region, const ElasticConstants& c)
    : grid_(grid), region_(region), constants_(c), active_of_node_(grid.size(), -1), slot_of_node_(grid.size(), -1) {
  const double h = grid.spacing();
  std::vector<double> dist(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    dist[k] = region.inside_distance(grid.point(k)) / h;
    if (dist[k] > -kBand) {
      slot_of_node_[k] = static_cast<int>(slot_nodes_.size());
      slot_nodes_.push_back(k);
    }
    if (dist[k] >= kActiveThreshold) {
      active_of_node_[k] = static_cast<int>(active_nodes_.size());
      active_nodes_.push_back(k);
    }
  }
  for (std::size_t k : slot_nodes_) {
    const int i = grid.column(k), j = grid.row(k);
    if (i < 2 || j < 2 || i >= grid.nx() - 2 || j >= grid.ny() - 2)
      throw ValidationError("solver: grid padding too small for the ghost band");
  }

  std::vector<Triplet> pa, pc;
  for (std::size_t s = 0; s < slot_nodes_.size(); ++s) {
    const std::size_t k = slot_nodes_[s];
    if (active_of_node_[k] >= 0) {
      pa.emplace_back(static_cast<int>(s), active_of_node_[k], 1.0);
      continue;
    }
    const Vec2 x = grid.point(k);
    const int i0 = grid.column(k), j0 = grid.row(k);
    Ghost g;
    g.slot = s;
    g.component = region.nearest_component(x);
    const Circle circle = g.component < 0 ? region.outer() : region.holes()[static_cast<std::size_t>(g.component)];
    const Vec2 rel = x - circle.center;
    const bool along_x = std::abs(rel.x) >= std::abs(rel.y);
    const double toward = g.component < 0 ? -1.0 : 1.0;  // into the region along the axis
    const double sign = toward * ((along_x ? rel.x : rel.y) >= 0.0 ? 1.0 : -1.0);
    g.axis = along_x ? Vec2{sign, 0.0} : Vec2{0.0, sign};
    // |rel + t e|² = ρ²: entry into the disk for the outer circle, exit from the hole for a core.
    const double b = dot(rel, g.axis);
    const double disc = b * b - (norm2(rel) - circle.radius * circle.radius);
    if (disc < 0.0) throw NumericalError("solver: ghost axis misses its boundary circle");
    const double tb = (g.component < 0 ? -b - std::sqrt(disc) : -b + std::sqrt(disc)) / h;
    g.foot = x + (tb * h) * g.axis;

    std::array<double, 2> t{};
    int found = 0;
    for (int step = 1; step < 8 && found < 2; ++step) {
      const int ii = i0 + static_cast<int>(g.axis.x) * step;
      const int jj = j0 + static_cast<int>(g.axis.y) * step;
      if (!grid.contains(ii, jj)) break;
      const int a = active_of_node_[grid.index(ii, jj)];
      if (a >= 0 && step > tb) {
        g.active[static_cast<std::size_t>(found)] = a;
        t[static_cast<std::size_t>(found)] = step;
        ++found;
      } else if (found > 0) {
        throw NumericalError("solver: gap in the extrapolation line of a ghost node (grid too coarse)");
      }
    }
    if (found < 2) throw NumericalError("solver: ghost node without two unknowns along its axis (grid too coarse)");
    // Work in τ = t - tb: p(τ) = g + g'τ + Aτ² + Bτ³, evaluated at τ0 = -tb. Lengths in spacings.
    const double tau0 = -tb, t1 = t[0] - tb, t2 = t[1] - tb;
    Eigen::Matrix2d m;
    m << t1 * t1, t1 * t1 * t1, t2 * t2, t2 * t2 * t2;
    const Eigen::RowVector2d w = Eigen::RowVector2d(tau0 * tau0, tau0 * tau0 * tau0) * m.inverse();
    g.weight = {w(0), w(1)};
    g.value_coeff = 1.0 - w(0) - w(1);
    g.derivative_coeff = (tau0 - w(0) * t1 - w(1) * t2) * h;  // g' is per unit length
    for (int q = 0; q < 2; ++q) pa.emplace_back(static_cast<int>(s), g.active[static_cast<std::size_t>(q)], g.weight[static_cast<std::size_t>(q)]);
    if (g.component >= 0) {
      const int base = 3 * g.component;
      const Vec2 rb = g.foot - circle.center;
      pc.emplace_back(static_cast<int>(s), base, g.value_coeff);
      pc.emplace_back(static_cast<int>(s), base + 1, g.value_coeff * rb.x + g.derivative_coeff * g.axis.x);
      pc.emplace_back(static_cast<int>(s), base + 2, g.value_coeff * rb.y + g.derivative_coeff * g.axis.y);
    }
    ghosts_.push_back(g);
  }
  p_active_.resize(static_cast<long>(slot_nodes_.size()), static_cast<long>(active_nodes_.size()));
  p_active_.setFromTriplets(pa.begin(), pa.end());
  p_core_.resize(static_cast<long>(slot_nodes_.size()), static_cast<long>(core_parameters()));
  p_core_.setFromTriplets(pc.begin(), pc.end());

  std::vector<Triplet> lt;
  lt.reserve(active_nodes_.size() * kBilaplacian.size());
  const double scale = 1.0 / (c.plane_modulus() * h * h * h * h);
  for (std::size_t a = 0; a < active_nodes_.size(); ++a) {
    const std::size_t k = active_nodes_[a];
    const int i = grid.column(k), j = grid.row(k);
    for (const auto& e : kBilaplacian) {
      const int s = slot_of_node_[grid.index(i + e.di, j + e.dj)];
      if (s < 0) throw NumericalError("solver: stencil leaves the node set");
      lt.emplace_back(static_cast<int>(a), s, e.w * scale);
    }
  }
  rows_.resize(static_cast<long>(active_nodes_.size()), static_cast<long>(slot_nodes_.size()));
  rows_.setFromTriplets(lt.begin(), lt.end());

  const CellWeights weights(grid, region);
  for (std::size_t k : weights.support()) {
    const int i = grid.column(k), j = grid.row(k);
    std::array<int, 9> st{};
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int s = slot_of_node_[grid.index(i + di, j + dj)];
        if (s < 0) throw NumericalError("solver: quadrature stencil leaves the node set");
        st[static_cast<std::size_t>((dj + 1) * 3 + (di + 1))] = s;
      }
    }
    quad_nodes_.push_back(k);
    quad_weights_.push_back(weights[k]);
    quad_stencils_.push_back(st);
  }
}

Eigen::VectorXd Discretization::outer_offset(const std::function<TraceData(Vec2, Vec2)>& data) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<long>(slot_nodes_.size()));
  for (const Ghost& g : ghosts_) {
    if (g.component >= 0) continue;
    const TraceData t = data(g.foot, g.axis);
    q(static_cast<long>(g.slot)) = g.value_coeff * t.value + g.derivative_coeff * t.axis_derivative;
  }
  return q;
}

std::vector<Sym2> Discretization::quadrature_hessians(const Eigen::VectorXd& v) const {
  const double inv = 1.0 / (grid_.spacing() * grid_.spacing());
  std::vector<Sym2> out(quad_nodes_.size());
  for (std::size_t n = 0; n < quad_nodes_.size(); ++n) {
    const auto& s = quad_stencils_[n];
    auto at = [&](int di, int dj) { return v(s[static_cast<std::size_t>((dj + 1) * 3 + (di + 1))]); };
    const double c = at(0, 0);
    out[n] = {(at(1, 0) - 2.0 * c + at(-1, 0)) * inv, 0.25 * (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) * inv,
              (at(0, 1) - 2.0 * c + at(0, -1)) * inv};
  }
  return out;
}

double Discretization::bilinear(const std::vector<Sym2>& a, const std::vector<Sym2>& b) const {
  std::vector<double> terms(a.size());
  const double nu = constants_.poisson();
  for (std::size_t n = 0; n < a.size(); ++n)
    terms[n] = quad_weights_[n] * (contract(a[n], b[n]) - nu * a[n].trace() * b[n].trace());
  return 0.5 * constants_.compliance() * pairwise_sum(terms);
}

double Discretization::energy(const Eigen::VectorXd& slots) const {
  const auto h = quadrature_hessians(slots);
  return bilinear(h, h);
}

ScalarField Discretization::to_field(const Eigen::VectorXd& slots, std::span<const double> core_params) const {
  ScalarField f(grid_, region_);
  auto values = f.values();
  for (std::size_t s = 0; s < slot_nodes_.size(); ++s) values[slot_nodes_[s]] = slots(static_cast<long>(s));
  const auto holes = region_.holes();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (slot_of_node_[k] >= 0) continue;
    const Vec2 p = grid_.point(k);
    const int j = region_.hole_containing(p);
    if (j < 0) continue;
    const Vec2 r = p - holes[static_cast<std::size_t>(j)].center;
    const std::size_t b = 3 * static_cast<std::size_t>(j);
    values[k] = core_params[b] + core_params[b + 1] * r.x + core_params[b + 2] * r.y;
  }
  return f;
}

// Direct LU or BiCGSTAB with incomplete LU on the square collocation matrix.
class LinearSystem {
 public:
  LinearSystem(const SparseMatrix& k, const SolverOptions& options) : matrix_(k), options_(options) {
    if (options.method == LinearSolver::Direct) {
      lu_.emplace(k);
      method_ = "direct-umfpack";
    } else {
      iterative_ = std::make_unique<Iterative>();
      iterative_->setTolerance(options.tolerance);
      iterative_->setMaxIterations(options.max_iterations);
      iterative_->preconditioner().setDroptol(1e-5);
      iterative_->preconditioner().setFillfactor(20);
      iterative_->compute(k);
      if (iterative_->info() != Eigen::Success) throw NumericalError("incomplete LU preconditioner failed");
      method_ = "bicgstab-ilut";
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
    if (lu_) return lu_->solve(rhs);
    Eigen::VectorXd x = iterative_->solve(rhs);
    iterations_ += iterative_->iterations();
    if (iterative_->info() != Eigen::Success)
      throw NumericalError("BiCGSTAB did not converge, estimated error " + format_double(iterative_->error()));
    return x;
  }

  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const {
    const double nb = rhs.norm();
    return nb == 0.0 ? (matrix_ * x).norm() : (matrix_ * x - rhs).norm() / nb;
  }
  double rcond() const { return lu_ ? lu_->rcond() : kNaN; }
  long iterations() const { return iterations_; }
  const std::string& method() const { return method_; }

 private:
  using Iterative = Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>;
  const SparseMatrix& matrix_;
  SolverOptions options_;
  std::optional<SparseLU> lu_;
  std::unique_ptr<Iterative> iterative_;
  std::string method_;
  long iterations_ = 0;
};

Region disk_region(const Circle& domain, std::span<const Vec2> sites, double eps) {
  std::vector<Circle> holes;
  for (Vec2 s : sites) holes.push_back({s, eps});
  return Region(domain, holes);
}

void require_resolved_sites(std::span<const Vec2> sites, const Circle& domain, double h, const char* what) {
  for (Vec2 s : sites) {
    if (domain.radius - norm(s - domain.center) < 4.0 * h)
      throw ValidationError(std::string(what) + ": site closer than 4 grid spacings to the boundary");
  }
}

// Charge of core-affine fields per basis parameter.
using ChargeOfCore = std::function<Eigen::Vector3d(std::size_t core)>;

SolveReport solve_cores(const Circle& domain, std::span<const Vec2> sites, double eps, const ElasticConstants& c, int grid_n,
                        const SolverOptions& options, const ChargeOfCore& charge_of_core) {
  const auto t0 = Clock::now();
  const Grid grid = Grid::covering(domain, grid_n);
  if (!sites.empty() && eps < 4.0 * grid.spacing()) throw ValidationError("core radius must be at least 4 grid spacings");
  if (!sites.empty() && !(eps < min_separation(sites, domain)))
    throw ValidationError("core radius must be smaller than the separation D = " + format_double(min_separation(sites, domain)));
  const Region region = disk_region(domain, sites, eps);
  const Discretization disc(grid, region, c);
  const SparseMatrix k = disc.operator_rows() * disc.active_map();
  SolveTimings timings;
  timings.assembly = seconds_since(t0);

  const auto t1 = Clock::now();
  LinearSystem system(k, options);
  timings.factorization = seconds_since(t1);

  const auto t2 = Clock::now();
  const std::size_t np = disc.core_parameters();
  std::vector<Eigen::VectorXd> unknowns(np), slots(np);
  for (std::size_t p = 0; p < np; ++p) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<long>(np));
    e(static_cast<long>(p)) = 1.0;
    const Eigen::VectorXd core_slots = disc.core_map() * e;
    const Eigen::VectorXd rhs = -(disc.operator_rows() * core_slots);
    unknowns[p] = system.solve(rhs);
    slots[p] = disc.active_map() * unknowns[p] + core_slots;
  }
  std::vector<std::vector<Sym2>> hess(np);
  for (std::size_t p = 0; p < np; ++p) hess[p] = disc.quadrature_hessians(slots[p]);
  ReducedProblem reduced;
  reduced.quadratic = Eigen::MatrixXd::Zero(static_cast<long>(np), static_cast<long>(np));
  reduced.linear = Eigen::VectorXd::Zero(static_cast<long>(np));
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t q = 0; q <= p; ++q) {
      const double b = disc.bilinear(hess[p], hess[q]);
      reduced.quadratic(static_cast<long>(p), static_cast<long>(q)) = b;
      reduced.quadratic(static_cast<long>(q), static_cast<long>(p)) = b;
    }
  }
  for (std::size_t j = 0; j < sites.size(); ++j) reduced.linear.segment<3>(static_cast<long>(3 * j)) = charge_of_core(j);
  reduced.parameters = Eigen::VectorXd::Zero(static_cast<long>(np));
  if (np > 0) {
    const Eigen::LLT<Eigen::MatrixXd> llt(reduced.quadratic);
    if (llt.info() != Eigen::Success) throw NumericalError("reduced core energy is not positive definite");
    reduced.parameters = llt.solve(-0.5 * reduced.linear);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<long>(disc.active_count()));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<long>(disc.slot_count()));
  for (std::size_t p = 0; p < np; ++p) {
    z += reduced.parameters(static_cast<long>(p)) * unknowns[p];
    v += reduced.parameters(static_cast<long>(p)) * slots[p];
  }
  const Eigen::VectorXd rhs = -(disc.operator_rows() * (disc.core_map() * reduced.parameters));
  const double residual = system.residual(z, rhs);
  if (!(residual < std::max(options.tolerance, 1e-8) * 10.0))
    throw NumericalError("collocation residual " + format_double(residual) + " above tolerance");
  timings.solve = seconds_since(t2);

  const std::vector<double> params(reduced.parameters.data(), reduced.parameters.data() + np);
  SolveReport report{disc.to_field(v, params),
                     make_breakdown(disc.energy(v), reduced.linear.dot(reduced.parameters), region.describe()),
                     residual,
                     system.method(),
                     system.rcond(),
                     system.iterations(),
                     disc.active_count(),
                     reduced,
                     timings};
  return report;
}

}  // namespace

std::string solve_report_json(const SolveReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("value").value(r.value());
  w.key("energy").begin_object();
  w.key("bulk_G").value(r.energy.bulk_G).key("charge").value(r.energy.charge).key("total").value(r.energy.total);
  w.key("region").value(r.energy.region);
  w.end_object();
  w.key("residual").value(r.residual);
  w.key("method").value(r.method);
  w.key("rcond").value(r.rcond);
  w.key("iterations").value(r.iterations);
  w.key("unknowns").value(r.unknowns);
  w.key("grid").begin_object().key("delta").value(r.field.grid().spacing()).key("nodes").value(r.field.grid().nx()).end_object();
  const std::vector<double> params(r.reduced.parameters.data(), r.reduced.parameters.data() + r.reduced.parameters.size());
  w.key("core_parameters").value(std::span<const double>(params));
  w.key("timings").begin_object();
  w.key("assembly_s").value(r.timings.assembly).key("factorization_s").value(r.timings.factorization).key("solve_s").value(r.timings.solve);
  w.end_object();
  w.end_object();
  return w.str();
}

SolveReport solve_clamped_disclination(std::span<const Disclination> disclinations, const Circle& domain,
                                       const ElasticConstants& c, int grid_n, const SolverOptions& options) {
  const auto t0 = Clock::now();
  const Grid grid = Grid::covering(domain, grid_n);
  std::vector<Vec2> sites;
  for (const auto& d : disclinations) sites.push_back(d.site);
  require_resolved_sites(sites, domain, grid.spacing(), "solve_clamped_disclination");
  const Region region(domain);
  const Discretization disc(grid, region, c);
  const SparseMatrix k = disc.operator_rows() * disc.active_map();
  // Δ²-collocation of (1-ν²)/E Δ² v = -θ; each Dirac spread bilinearly over its cell, 1/Δ² per unit weight.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(disc.active_count()));
  const double h = grid.spacing();
  for (const auto& d : disclinations) {
    const auto [i, j] = grid.cell_of(d.site);
    const Vec2 base = grid.point(i, j);
    const double tx = (d.site.x - base.x) / h, ty = (d.site.y - base.y) / h;
    const std::array<std::tuple<int, int, double>, 4> corners{
        {{i, j, (1 - tx) * (1 - ty)}, {i + 1, j, tx * (1 - ty)}, {i, j + 1, (1 - tx) * ty}, {i + 1, j + 1, tx * ty}}};
    for (const auto& [ci, cj, w] : corners) {
      if (w == 0.0) continue;
      const int a = disc.active_of(grid.index(ci, cj));
      if (a < 0) throw ValidationError("solve_clamped_disclination: load touches a boundary node");
      rhs(a) -= d.frank_angle * w / (h * h);
    }
  }
  SolveTimings timings;
  timings.assembly = seconds_since(t0);
  const auto t1 = Clock::now();
  LinearSystem system(k, options);
  timings.factorization = seconds_since(t1);
  const auto t2 = Clock::now();
  const Eigen::VectorXd z = disclinations.empty() ? Eigen::VectorXd::Zero(rhs.size()) : system.solve(rhs);
  const double residual = system.residual(z, rhs);
  if (!(residual < std::max(options.tolerance, 1e-8) * 10.0))
    throw NumericalError("collocation residual " + format_double(residual) + " above tolerance");
  const Eigen::VectorXd v = disc.active_map() * z;
  timings.solve = seconds_since(t2);
  ScalarField field = disc.to_field(v, {});
  double charge = 0.0;
  for (const auto& d : disclinations) charge += d.frank_angle * interpolate_bilinear(field, d.site);
  SolveReport report{std::move(field),
                     make_breakdown(disc.energy(v), charge, region.describe()),
                     residual,
                     system.method(),
                     system.rcond(),
                     system.iterations(),
                     disc.active_count(),
                     {},
                     timings};
  return report;
}

SolveReport solve_core_constrained(std::span<const Dislocation> dislocations, double eps, const Circle& domain,
                                   const ElasticConstants& c, int grid_n, const SolverOptions& options) {
  const auto sites = dislocation_sites(dislocations);
  for (const auto& d : dislocations)
    if (!(norm(d.burgers) > 0.0)) throw ValidationError("solve_core_constrained: Burgers vector must be nonzero");
  // ⟨∇a, Π(b)⟩ for a = a0 + a1 (x - x_j)_1 + a2 (x - x_j)_2.
  return solve_cores(domain, sites, eps, c, grid_n, options, [&](std::size_t j) {
    const Vec2 pb = rotate_burgers(dislocations[j].burgers);
    return Eigen::Vector3d(0.0, pb.x, pb.y);
  });
}

SolveReport solve_dipole_core(std::span<const DisclinationDipole> dipoles, double eps, const Circle& domain,
                              const ElasticConstants& c, int grid_n, const SolverOptions& options) {
  std::vector<Vec2> sites;
  for (const auto& d : dipoles) {
    if (!(norm(d.burgers) > 0.0)) throw ValidationError("solve_dipole_core: Burgers vector must be nonzero");
    if (!(d.spacing > 0.0) || !(d.spacing < eps)) throw ValidationError("solve_dipole_core: 0 < h < eps violated");
    sites.push_back(d.center);
  }
  return solve_cores(domain, sites, eps, c, grid_n, options, [&](std::size_t j) {
    const DisclinationDipole& d = dipoles[j];
    Eigen::Vector3d out;
    for (int p = 0; p < 3; ++p) {
      auto basis = [&](Vec2 x) {
        const Vec2 r = x - d.center;
        return p == 0 ? 1.0 : (p == 1 ? r.x : r.y);
      };
      out(p) = dipole_circle_term(basis, d.center, d.axis(), d.charge(), d.spacing, eps);
    }
    return out;
  });
}

double plastic_radius(std::span<const Dislocation> dislocations, const Circle& domain) {
  double far = 0.0;
  for (const auto& d : dislocations) far = std::max(far, norm(d.site - domain.center));
  return domain.radius + far;
}

SolveReport solve_elastic_correction(std::span<const Dislocation> dislocations, const Circle& domain, const ElasticConstants& c,
                                     int grid_n, const SolverOptions& options) {
  const auto t0 = Clock::now();
  const Grid grid = Grid::covering(domain, grid_n);
  const auto sites = dislocation_sites(dislocations);
  for (Vec2 s : sites)
    if (!(norm(s - domain.center) < domain.radius)) throw ValidationError("solve_elastic_correction: site outside the domain");
  const double radius = plastic_radius(dislocations, domain);
  const AiryFunction plastic = dislocation_limit_field(dislocations, radius, c);
  const Region region(domain);
  const Discretization disc(grid, region, c);
  const SparseMatrix k = disc.operator_rows() * disc.active_map();
  const Eigen::VectorXd q = disc.outer_offset([&](Vec2 foot, Vec2 axis) {
    const AiryDerivatives d = plastic.derivatives(foot);
    return TraceData{-d.value, -dot(d.gradient, axis)};
  });
  const Eigen::VectorXd rhs = -(disc.operator_rows() * q);
  SolveTimings timings;
  timings.assembly = seconds_since(t0);
  const auto t1 = Clock::now();
  LinearSystem system(k, options);
  timings.factorization = seconds_since(t1);
  const auto t2 = Clock::now();
  const Eigen::VectorXd z = rhs.norm() == 0.0 ? Eigen::VectorXd::Zero(rhs.size()) : system.solve(rhs);
  const double residual = system.residual(z, rhs);
  if (!(residual < std::max(options.tolerance, 1e-8) * 10.0))
    throw NumericalError("collocation residual " + format_double(residual) + " above tolerance");
  const Eigen::VectorXd v = disc.active_map() * z + q;
  timings.solve = seconds_since(t2);
  double pairs = 0.0;
  for (const auto& dj : dislocations) {
    const AiryFunction wj([&, dj](Vec2 x) { return dislocation_limit_derivatives(x, dj.burgers, dj.site, radius, c); });
    for (const auto& dk : dislocations) {
      const AiryFunction wk([&, dk](Vec2 x) { return dislocation_limit_derivatives(x, dk.burgers, dk.site, radius, c); });
      pairs += boundary_pair_form(wj, wk, domain, true, c);
    }
  }
  SolveReport report{disc.to_field(v, {}),
                     make_breakdown(disc.energy(v), -pairs, region.describe()),
                     residual,
                     system.method(),
                     system.rcond(),
                     system.iterations(),
                     disc.active_count(),
                     {},
                     timings};
  return report;
}

}  // namespace airy
