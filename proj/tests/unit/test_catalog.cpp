#include <catch2/catch_amalgamated.hpp>

#include "sphereform/catalog.hpp"
#include "test_helpers.hpp"

using namespace sphereform;
using Catch::Approx;

TEST_CASE("every shipped entry self-validates") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  for (const auto& entry : catalog::standard_entries()) {
    const auto result = catalog::validate(entry, mesh);
    INFO(entry.name << ": " << result.detail);
    REQUIRE(result.pass);
  }
}

TEST_CASE("frozen bands hold at higher resolution") {
  // the bands were frozen from a level-6 run; level 5 sampling must stay
  // inside them
  const SphereMesh fine = SphereMesh::icosphere(5);
  for (const auto& entry : catalog::standard_entries()) {
    if (entry.range_provenance != "sampled") continue;
    const auto range = curvature_range(catalog::make(entry), fine);
    INFO(entry.name);
    REQUIRE(range.lambda_min >= entry.expected_range.lo);
    REQUIRE(range.lambda_max <= entry.expected_range.hi);
  }
}

TEST_CASE("regime coverage of the catalog") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  bool disjoint_below = false, disjoint_above = false, overlapping = false;
  bool euclid_neg = false, euclid_pos = false, nonvanishing_gauss = false;
  for (const auto& entry : catalog::standard_entries()) {
    const Immersion f = catalog::make(entry);
    const auto range = curvature_range(f, mesh);
    const double kappa = entry.model.kappa;
    if (entry.model.hyperbolic()) {
      if (range.lambda_max < -kappa) disjoint_below = true;
      if (range.lambda_min > kappa) disjoint_above = true;
      if (range.lambda_min < -kappa && range.lambda_max > -kappa) overlapping = true;
    } else {
      if (range.lambda_max < 0.0) euclid_neg = true;
      if (range.lambda_min > 0.0) euclid_pos = true;
      if (range.lambda_min * range.lambda_max > 0.0) nonvanishing_gauss = true;
    }
  }
  CHECK(disjoint_below);
  CHECK(disjoint_above);
  CHECK(overlapping);
  CHECK(euclid_neg);
  CHECK(euclid_pos);
  CHECK(nonvanishing_gauss);
}

TEST_CASE("single-signed curvature outside the band, and the mixed control") {
  // entries sampling entirely outside [-kappa, kappa] must be single-signed;
  // the overlap entry is the deliberate negative control
  const SphereMesh mesh = SphereMesh::icosphere(3);
  int outside_entries = 0;
  for (const auto& entry : catalog::standard_entries()) {
    if (!entry.model.hyperbolic()) continue;
    const auto range = curvature_range(catalog::make(entry), mesh);
    const double kappa = entry.model.kappa;
    const bool all_outside = std::min(std::abs(range.lambda_min), std::abs(range.lambda_max)) > kappa &&
                             range.lambda_min * range.lambda_max > 0.0;
    const bool single_signed = range.lambda_max < -kappa || range.lambda_min > kappa;
    if (entry.name == "bumpy_ball_sphere") {
      CHECK(!single_signed);  // straddles -kappa by construction
      CHECK(range.lambda_min < -kappa);
      CHECK(range.lambda_max > -kappa);
    } else {
      ++outside_entries;
      CHECK(all_outside);
      CHECK(single_signed);
    }
  }
  CHECK(outside_entries >= 3);
}

TEST_CASE("constructor preconditions") {
  CHECK_THROWS_AS(catalog::make("halfspace_sphere", {{"mu", -0.5}, {"kappa", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(catalog::make("ball_sphere", {{"mu", -1.0}, {"kappa", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(catalog::make("no_such_surface"), std::invalid_argument);
}

TEST_CASE("bumpy amplitude controls the curvature band") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  const auto tight = curvature_range(catalog::make("bumpy_sphere", {{"eps", 0.01}}), mesh);
  const auto wide = curvature_range(catalog::make("bumpy_sphere", {{"eps", 0.05}}), mesh);
  CHECK(tight.lambda_max - tight.lambda_min < wide.lambda_max - wide.lambda_min);
  CHECK(tight.lambda_min > -1.05);
  CHECK(tight.lambda_max < -0.95);
  // spec band for eps = 0.05
  CHECK(wide.lambda_min > -1.4);
  CHECK(wide.lambda_max < -0.6);
}
