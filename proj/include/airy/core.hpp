#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace airy {

// Bad input or violated precondition. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular system, failed convergence, unresolved quadrature. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Clockwise quarter turn: (b1, b2) -> (b2, -b1).
constexpr Vec2 rotate_burgers(Vec2 b) { return {b.y, -b.x}; }

struct LamePair {
  double lambda = 0.0;
  double mu = 0.0;
};

// Throws ValidationError naming the violated inequality (E > 0, nu > -1, nu < 1/2).
LamePair lame_from_young_poisson(double young, double poisson);

class ElasticConstants {
 public:
  ElasticConstants(double young, double poisson);
  // Inverse map; requires mu > 0 and lambda + mu > 0.
  static ElasticConstants from_lame(LamePair lame);

  double young() const { return young_; }
  double poisson() const { return poisson_; }
  double lambda() const { return lame_.lambda; }
  double mu() const { return lame_.mu; }
  LamePair lame() const { return lame_; }
  // E / (1 - nu^2): the prefactor of every closed-form Airy potential.
  double plane_modulus() const { return young_ / (1.0 - poisson_ * poisson_); }
  // (1 + nu) / E: the prefactor of the Airy energy density.
  double compliance() const { return (1.0 + poisson_) / young_; }

 private:
  double young_;
  double poisson_;
  LamePair lame_;
};

struct Circle {
  Vec2 center;
  double radius = 1.0;
};

struct Disclination {
  Vec2 site;
  double frank_angle = 0.0;
};

struct Dislocation {
  Vec2 site;
  Vec2 burgers;
};

// Pair of opposite wedge disclinations approximating the dislocation `burgers`.
// The +|b| pole sits at center + (h/2) axis, the -|b| pole at center - (h/2) axis.
struct DisclinationDipole {
  Vec2 center;
  Vec2 burgers;
  double spacing = 0.0;

  double charge() const { return norm(burgers); }
  Vec2 axis() const { return rotate_burgers(burgers) / norm(burgers); }
  Vec2 positive_pole() const { return center + 0.5 * spacing * axis(); }
  Vec2 negative_pole() const { return center - 0.5 * spacing * axis(); }
  Dislocation target() const { return {center, burgers}; }
};

struct DiskDomain {
  Circle disk;
  std::vector<Circle> cores;

  // Checks R > 0, cores inside the disk and pairwise disjoint.
  void validate() const;
};

struct DefectConfiguration {
  double young = 1.0;
  double poisson = 0.3;
  Circle domain{{0.0, 0.0}, 1.0};
  std::vector<Disclination> disclinations;
  std::vector<Dislocation> dislocations;
  std::vector<DisclinationDipole> dipoles;
  std::optional<double> core_radius;

  ElasticConstants constants() const { return {young, poisson}; }
  std::vector<Vec2> sites() const;
  // Nonzero weights, sites strictly inside, distinct dislocation sites, dipole h > 0.
  void validate() const;
};

DefectConfiguration configuration_from_json(const std::string& text);
std::string configuration_to_json(const DefectConfiguration& config);

// Minimum over sites of half pairwise distances and distances to the boundary.
double min_separation(std::span<const Vec2> sites, const Circle& domain);
double min_separation(const DefectConfiguration& config);

std::vector<Vec2> dislocation_sites(std::span<const Dislocation> dislocations);

// Recursive pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

// Worker count: AIRY_DEFECTS_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n) over contiguous blocks; body must not share mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace airy
