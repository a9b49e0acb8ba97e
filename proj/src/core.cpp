#include "airy/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "airy/json_writer.hpp"

namespace airy {

LamePair lame_from_young_poisson(double young, double poisson) {
  if (!(young > 0.0)) throw ValidationError("elastic constants: E > 0 violated (E = " + format_double(young) + ")");
  if (!(poisson > -1.0)) throw ValidationError("elastic constants: nu > -1 violated (nu = " + format_double(poisson) + ")");
  if (!(poisson < 0.5)) throw ValidationError("elastic constants: nu < 1/2 violated (nu = " + format_double(poisson) + ")");
  return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)), young / (2.0 * (1.0 + poisson))};
}

ElasticConstants::ElasticConstants(double young, double poisson)
    : young_(young), poisson_(poisson), lame_(lame_from_young_poisson(young, poisson)) {}

ElasticConstants ElasticConstants::from_lame(LamePair lame) {
  if (!(lame.mu > 0.0)) throw ValidationError("Lame pair: mu > 0 violated");
  if (!(lame.lambda + lame.mu > 0.0)) throw ValidationError("Lame pair: lambda + mu > 0 violated");
  const double sum = lame.lambda + lame.mu;
  return {lame.mu * (3.0 * lame.lambda + 2.0 * lame.mu) / sum, lame.lambda / (2.0 * sum)};
}

void DiskDomain::validate() const {
  if (!(disk.radius > 0.0)) throw ValidationError("domain: radius must be positive");
  for (std::size_t j = 0; j < cores.size(); ++j) {
    const Circle& c = cores[j];
    if (!(c.radius > 0.0)) throw ValidationError("domain: core radius must be positive");
    if (norm(c.center - disk.center) + c.radius >= disk.radius)
      throw ValidationError("domain: core " + std::to_string(j) + " touches the outer boundary");
    for (std::size_t k = 0; k < j; ++k) {
      if (norm(c.center - cores[k].center) <= c.radius + cores[k].radius)
        throw ValidationError("domain: cores " + std::to_string(k) + " and " + std::to_string(j) + " overlap");
    }
  }
}

std::vector<Vec2> DefectConfiguration::sites() const {
  std::vector<Vec2> out;
  for (const auto& d : disclinations) out.push_back(d.site);
  for (const auto& d : dislocations) out.push_back(d.site);
  for (const auto& d : dipoles) out.push_back(d.center);
  return out;
}

namespace {

void require_inside(Vec2 p, const Circle& domain, const std::string& what) {
  if (!(norm(p - domain.center) < domain.radius))
    throw ValidationError(what + " site (" + format_double(p.x) + ", " + format_double(p.y) + ") is not inside the domain");
}

}  // namespace

void DefectConfiguration::validate() const {
  ElasticConstants check(young, poisson);
  (void)check;
  if (!(domain.radius > 0.0)) throw ValidationError("domain: R must be positive");
  for (const auto& d : disclinations) {
    if (d.frank_angle == 0.0 || !std::isfinite(d.frank_angle)) throw ValidationError("disclination: Frank angle must be nonzero");
    require_inside(d.site, domain, "disclination");
  }
  for (std::size_t j = 0; j < dislocations.size(); ++j) {
    const auto& d = dislocations[j];
    if (!(norm(d.burgers) > 0.0)) throw ValidationError("dislocation: Burgers vector must be nonzero");
    require_inside(d.site, domain, "dislocation");
    for (std::size_t k = 0; k < j; ++k) {
      if (dislocations[k].site == d.site) throw ValidationError("dislocation: sites must be pairwise distinct");
    }
  }
  for (const auto& d : dipoles) {
    if (!(norm(d.burgers) > 0.0)) throw ValidationError("dipole: Burgers vector must be nonzero");
    if (!(d.spacing > 0.0)) throw ValidationError("dipole: spacing h must be positive");
    require_inside(d.positive_pole(), domain, "dipole pole");
    require_inside(d.negative_pole(), domain, "dipole pole");
    if (core_radius && !(d.spacing < *core_radius)) throw ValidationError("dipole: h < core radius violated");
  }
  if (core_radius) {
    if (!(*core_radius > 0.0)) throw ValidationError("core_radius must be positive");
    const auto s = sites();
    if (!s.empty() && !(*core_radius < min_separation(s, domain)))
      throw ValidationError("core_radius must be smaller than the separation D = " + format_double(min_separation(s, domain)));
  }
}

namespace {

Vec2 read_vec(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw ValidationError(std::string("expected a 2-vector for '") + key + "'");
  return {a[0].get<double>(), a[1].get<double>()};
}

}  // namespace

DefectConfiguration configuration_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("configuration is not valid JSON: ") + e.what());
  }
  DefectConfiguration c;
  try {
    c.young = j.value("E", 1.0);
    c.poisson = j.value("nu", 0.3);
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      if (d.contains("center")) c.domain.center = read_vec(d, "center");
      c.domain.radius = d.value("R", 1.0);
    }
    for (const auto& e : j.value("disclinations", nlohmann::json::array()))
      c.disclinations.push_back({read_vec(e, "site"), e.at("s").get<double>()});
    for (const auto& e : j.value("dislocations", nlohmann::json::array()))
      c.dislocations.push_back({read_vec(e, "site"), read_vec(e, "b")});
    for (const auto& e : j.value("dipoles", nlohmann::json::array()))
      c.dipoles.push_back({read_vec(e, "center"), read_vec(e, "b"), e.at("h").get<double>()});
    if (j.contains("core_radius") && !j.at("core_radius").is_null()) c.core_radius = j.at("core_radius").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

std::string configuration_to_json(const DefectConfiguration& c) {
  JsonWriter w;
  w.begin_object();
  w.key("E").value(c.young);
  w.key("nu").value(c.poisson);
  w.key("domain").begin_object();
  w.key("center").value(c.domain.center);
  w.key("R").value(c.domain.radius);
  w.end_object();
  w.key("disclinations").begin_array();
  for (const auto& d : c.disclinations) {
    w.begin_object().key("site").value(d.site).key("s").value(d.frank_angle).end_object();
  }
  w.end_array();
  w.key("dislocations").begin_array();
  for (const auto& d : c.dislocations) {
    w.begin_object().key("site").value(d.site).key("b").value(d.burgers).end_object();
  }
  w.end_array();
  w.key("dipoles").begin_array();
  for (const auto& d : c.dipoles) {
    w.begin_object().key("center").value(d.center).key("b").value(d.burgers).key("h").value(d.spacing).end_object();
  }
  w.end_array();
  if (c.core_radius) w.key("core_radius").value(*c.core_radius);
  w.end_object();
  return w.str();
}

double min_separation(std::span<const Vec2> sites, const Circle& domain) {
  if (sites.empty()) throw ValidationError("min_separation: at least one site is required");
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const double to_boundary = domain.radius - norm(sites[j] - domain.center);
    if (!(to_boundary > 0.0)) throw ValidationError("min_separation: site outside the domain");
    d = std::min(d, to_boundary);
    for (std::size_t k = 0; k < j; ++k) d = std::min(d, 0.5 * norm(sites[j] - sites[k]));
  }
  return d;
}

double min_separation(const DefectConfiguration& config) {
  const auto s = config.sites();
  return min_separation(s, config.domain);
}

std::vector<Vec2> dislocation_sites(std::span<const Dislocation> dislocations) {
  std::vector<Vec2> out;
  out.reserve(dislocations.size());
  for (const auto& d : dislocations) out.push_back(d.site);
  return out;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

unsigned thread_count() {
  if (const char* env = std::getenv("AIRY_DEFECTS_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / 1024));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace airy
