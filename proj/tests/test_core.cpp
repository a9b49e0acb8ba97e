#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "airy/core.hpp"
#include "airy/json_writer.hpp"

using namespace airy;

TEST(Elastic, LameFromYoungPoisson) {
  const LamePair l = lame_from_young_poisson(1.0, 0.3);
  EXPECT_NEAR(l.mu, 1.0 / 2.6, 1e-15);
  EXPECT_NEAR(l.lambda, 0.3 / (1.3 * 0.4), 1e-15);
}

TEST(Elastic, RoundTripThroughLame) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(0.1, 10.0), nu(-0.95, 0.49);
  for (int i = 0; i < 200; ++i) {
    const ElasticConstants c(e(rng), nu(rng));
    const ElasticConstants back = ElasticConstants::from_lame(c.lame());
    EXPECT_NEAR(back.young(), c.young(), 1e-12 * c.young());
    EXPECT_NEAR(back.poisson(), c.poisson(), 1e-12);
  }
}

TEST(Elastic, RejectsInadmissibleConstants) {
  EXPECT_THROW(ElasticConstants(0.0, 0.3), ValidationError);
  EXPECT_THROW(ElasticConstants(1.0, 0.5), ValidationError);
  EXPECT_THROW(ElasticConstants(1.0, -1.0), ValidationError);
  EXPECT_THROW(ElasticConstants::from_lame({1.0, 0.0}), ValidationError);
  EXPECT_THROW(ElasticConstants::from_lame({-2.0, 1.0}), ValidationError);
}

TEST(Elastic, DerivedModuli) {
  const ElasticConstants c(1.0, 0.3);
  EXPECT_DOUBLE_EQ(c.plane_modulus(), 1.0 / 0.91);
  EXPECT_DOUBLE_EQ(c.compliance(), 1.3);
}

TEST(Geometry, RotatedBurgers) {
  EXPECT_EQ(rotate_burgers({0.0, 1.0}), (Vec2{1.0, 0.0}));
  EXPECT_EQ(rotate_burgers({1.0, 0.0}), (Vec2{0.0, -1.0}));
  const Vec2 b{0.3, -0.7};
  EXPECT_DOUBLE_EQ(dot(rotate_burgers(b), b), 0.0);
  EXPECT_DOUBLE_EQ(norm(rotate_burgers(b)), norm(b));
}

TEST(Geometry, DipolePolesLieAlongRotatedBurgers) {
  const DisclinationDipole d{{0.1, 0.2}, {0.0, 2.0}, 0.01};
  EXPECT_DOUBLE_EQ(d.charge(), 2.0);
  EXPECT_NEAR(d.positive_pole().x, 0.105, 1e-15);
  EXPECT_NEAR(d.negative_pole().x, 0.095, 1e-15);
  EXPECT_DOUBLE_EQ(d.positive_pole().y, 0.2);
}

TEST(Geometry, MinSeparation) {
  const Circle unit{{0.0, 0.0}, 1.0};
  const std::array<Vec2, 2> sites{Vec2{-0.4, 0.0}, Vec2{0.4, 0.0}};
  EXPECT_NEAR(min_separation(sites, unit), 0.4, 1e-15);
  const std::array<Vec2, 2> near{Vec2{-0.1, 0.0}, Vec2{0.1, 0.0}};
  EXPECT_NEAR(min_separation(near, unit), 0.1, 1e-15);
  const std::array<Vec2, 1> one{Vec2{0.0, 0.75}};
  EXPECT_NEAR(min_separation(one, unit), 0.25, 1e-15);
}

TEST(Configuration, ParsesAndValidates) {
  const auto config = configuration_from_json(R"({"E": 2.0, "nu": 0.25, "domain": {"center": [0, 0], "R": 2},
    "dislocations": [{"site": [0.5, 0], "b": [0, 1]}, {"site": [-0.5, 0], "b": [0, -1]}], "core_radius": 0.1})");
  EXPECT_DOUBLE_EQ(config.young, 2.0);
  EXPECT_DOUBLE_EQ(config.domain.radius, 2.0);
  ASSERT_EQ(config.dislocations.size(), 2u);
  EXPECT_NO_THROW(config.validate());
  const auto again = configuration_from_json(configuration_to_json(config));
  EXPECT_EQ(configuration_to_json(again), configuration_to_json(config));
}

TEST(Configuration, RejectsInvalidInput) {
  EXPECT_THROW(configuration_from_json("{not json"), ValidationError);
  EXPECT_THROW(configuration_from_json(R"({"dislocations": [{"site": [0, 0]}]})"), ValidationError);
  EXPECT_THROW(configuration_from_json(R"({"dislocations": [{"site": [2, 0], "b": [0, 1]}]})").validate(), ValidationError);
  EXPECT_THROW(configuration_from_json(R"({"dislocations": [{"site": [0, 0], "b": [0, 0]}]})").validate(), ValidationError);
  EXPECT_THROW(configuration_from_json(R"({"disclinations": [{"site": [0, 0], "s": 1}], "core_radius": 1.5})").validate(),
               ValidationError);
  EXPECT_THROW(configuration_from_json(R"({"nu": 0.5})").validate(), ValidationError);
  EXPECT_THROW(
      configuration_from_json(R"({"dislocations": [{"site": [0.1, 0], "b": [0, 1]}, {"site": [0.1, 0], "b": [1, 0]}]})").validate(),
      ValidationError);
}

TEST(Summation, PairwiseIsAccurateAndOrderDeterministic) {
  std::vector<double> v(100000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 10000.0, 1e-9);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Json, FixedFormatting) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "null");
  JsonWriter w;
  w.begin_object().key("a").value(1.5).key("b").begin_array().value(1).value(true).end_array().key("c").value("x\"y").end_object();
  EXPECT_EQ(w.str(), R"({"a":1.5,"b":[1,true],"c":"x\"y"})");
}
