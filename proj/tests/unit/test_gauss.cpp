#include <catch2/catch_amalgamated.hpp>

#include "sphereform/catalog.hpp"
#include "test_helpers.hpp"

using namespace sphereform;
using Catch::Approx;

namespace {

ChartPoint random_chart_point(int n = 2, double radius = 0.95) {
  return ChartPoint(oracle::uniform(0, 1) < 0.5 ? ChartId::North : ChartId::South,
                    oracle::uniform(0.05, radius) * oracle::random_unit(n));
}

}  // namespace

TEST_CASE("flat Gauss map of the round half-space sphere is the identity") {
  const Immersion sigma = catalog::make("halfspace_sphere", {{"mu", -2.0}});
  for (int trial = 0; trial < 20; ++trial) {
    const ChartPoint p = random_chart_point();
    REQUIRE((flat_gauss(sigma, p) - sphere_point(p)).norm() < 1e-12);
  }
  const Immersion ball = catalog::make("ball_sphere", {{"mu", -2.0}});
  CHECK_THROWS_AS(flat_gauss(ball, random_chart_point()), std::invalid_argument);
}

TEST_CASE("flat Gauss map composes with diffeomorphisms by the sign rule") {
  const Immersion f = catalog::make("bumpy_halfspace_sphere");
  for (const auto& g : {SphereDiffeo::identity(2), SphereDiffeo::reflection(2),
                        SphereDiffeo::antipodal(2)}) {
    const Immersion fg = precompose(f, g);
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      const Vec lhs = flat_gauss(fg, p);
      const Vec rhs = g.degree * flat_gauss(f, g.map(p));
      REQUIRE((lhs - rhs).norm() < 1e-8);
    }
  }
}

TEST_CASE("flat Gauss map is invariant under the upper-triangular isometries") {
  // gamma(p) = t p + (a, 0) preserves half-space geometry and leaves the
  // Euclidean normal directions of a round sphere unchanged
  const Immersion sigma = catalog::make("halfspace_sphere", {{"mu", -2.0}});
  Immersion moved;
  moved.model = sigma.model;
  const double t = 1.7;
  Vec shift = Vec::Zero(3);
  shift(0) = 0.4;
  shift(1) = -0.9;
  moved.eval = [sigma, t, shift](const ChartPoint& p) -> Vec {
    return t * sigma.eval(p) + shift;
  };
  for (int trial = 0; trial < 10; ++trial) {
    const ChartPoint p = random_chart_point();
    REQUIRE((flat_gauss(moved, p) - flat_gauss(sigma, p)).norm() < 1e-9);
  }
}

TEST_CASE("flat-Gauss derivative identity") {
  SECTION("round sphere: residual below 1e-6") {
    const Immersion sigma = catalog::make("halfspace_sphere", {{"mu", -2.0}});
    for (int trial = 0; trial < 20; ++trial) {
      const ChartPoint p = random_chart_point();
      const ShapeData sd = shape_data(sigma, p);
      for (int k = 0; k < 2; ++k)
        REQUIRE(flat_gauss_derivative_residual(sigma, p, sd.directions.col(k), sd.lambdas(k)) <
                1e-6);
    }
  }
  SECTION("bumpy hyperbolic sphere: 100 random principal pairs below 1e-5") {
    const Immersion f = catalog::make("bumpy_halfspace_sphere");
    for (int trial = 0; trial < 50; ++trial) {
      const ChartPoint p = random_chart_point();
      const ShapeData sd = shape_data(f, p);
      for (int k = 0; k < 2; ++k)
        REQUIRE(flat_gauss_derivative_residual(f, p, sd.directions.col(k), sd.lambdas(k)) < 1e-5);
    }
  }
  SECTION("|lambda| > kappa keeps the predicted factor away from zero") {
    const Immersion f = catalog::make("bumpy_halfspace_sphere");
    for (int trial = 0; trial < 20; ++trial) {
      const ChartPoint p = random_chart_point();
      const Jet2Sample j = jet(f, p);
      const Vec nu_bar = euclidean_unit_normal(f, j);
      CHECK(std::abs(nu_bar(2)) <= 1.0 + 1e-12);  // Euclidean-unit component
      const ShapeData sd = shape_data(f, j);
      for (int k = 0; k < 2; ++k) REQUIRE(std::abs(nu_bar(2) - sd.lambdas(k)) > 0.5);
    }
  }
}

TEST_CASE("visual Gauss map examples") {
  SECTION("radial ball sphere: nu_hat is the identity") {
    const Immersion sigma = catalog::make("ball_sphere", {{"mu", -2.0}});
    for (int trial = 0; trial < 15; ++trial) {
      const ChartPoint p = random_chart_point();
      REQUIRE((visual_gauss(sigma, p) - sphere_point(p)).norm() < 1e-12);
    }
  }
  SECTION("nu_check of the radial sphere is the antipodal map") {
    const Immersion sigma = catalog::make("ball_sphere", {{"mu", -2.0}});
    for (int trial = 0; trial < 15; ++trial) {
      const ChartPoint p = random_chart_point();
      REQUIRE((check_gauss(sigma, p) + sphere_point(p)).norm() < 1e-12);
    }
  }
  SECTION("composition with a reflection follows the sign rule") {
    const Immersion sigma = catalog::make("ball_sphere", {{"mu", -2.0}});
    const SphereDiffeo rho = SphereDiffeo::reflection(2);
    const Immersion sr = precompose(sigma, rho);
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      // nu_{sigma o rho} = -nu_sigma o rho: the inward ray exits at the
      // antipode of the reflected point
      const Vec expected = -sphere_point(rho.map(p));
      REQUIRE((visual_gauss(sr, p) - expected).norm() < 1e-10);
      // and it is neither the identity nor the antipodal map
      CHECK((visual_gauss(sr, p) - sphere_point(p)).norm() > 0.1);
    }
  }
  SECTION("half-space and ball computations agree") {
    const Immersion fb = catalog::make("bumpy_ball_sphere");
    const Immersion fh = convert_immersion(fb, SpaceFormModel::half_space(3, 1.0));
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      REQUIRE((visual_gauss(fb, p) - visual_gauss(fh, p)).norm() < 1e-8);
    }
  }
}

TEST_CASE("sphere maps output unit vectors") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  std::vector<SphereMap> maps;
  maps.push_back(gauss_sphere_map(catalog::make("bumpy_sphere")));
  maps.push_back(flat_gauss_sphere_map(catalog::make("bumpy_halfspace_sphere")));
  maps.push_back(visual_gauss_sphere_map(catalog::make("bumpy_ball_sphere")));
  maps.push_back(check_gauss_sphere_map(catalog::make("bumpy_ball_sphere")));
  for (const auto& m : maps)
    for (std::size_t v = 0; v < mesh.size(); v += 7)
      REQUIRE(m.eval(mesh.vertices[v]).norm() == Approx(1.0).margin(1e-10));
}

TEST_CASE("jacobian fields of the certified maps") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  SECTION("identity-like flat Gauss map") {
    const auto jf =
        jacobian_field(flat_gauss_sphere_map(catalog::make("halfspace_sphere", {{"mu", -2.0}})), mesh);
    CHECK(jf.sign == 1);
    CHECK(jf.all_certified);
  }
  SECTION("Euclidean Gauss map with I < 0") {
    const auto jf = jacobian_field(gauss_sphere_map(catalog::make("ellipsoid")), mesh);
    CHECK(jf.sign == 1);
  }
  SECTION("visual map of the overlap-regime entry is a local diffeomorphism") {
    const auto jf =
        jacobian_field(visual_gauss_sphere_map(catalog::make("bumpy_ball_sphere")), mesh);
    CHECK(jf.all_certified);
    CHECK(jf.sign != 0);
    // the computation itself at higher resolution confirms the certificate
    const auto fine =
        jacobian_field(visual_gauss_sphere_map(catalog::make("bumpy_ball_sphere")),
                       SphereMesh::icosphere(4), FrameKind::Round);
    CHECK(fine.all_certified);
    CHECK(fine.sign == jf.sign);
  }
  SECTION("check map certifies when curvatures exceed +kappa") {
    const auto jf = jacobian_field(
        check_gauss_sphere_map(catalog::make("reflected_halfspace_sphere", {{"mu", -2.0}})), mesh);
    CHECK(jf.all_certified);
    CHECK(jf.sign != 0);
  }
}

TEST_CASE("degree table at n = 2") {
  const SphereMesh mesh = SphereMesh::icosphere(4);
  struct Row {
    const char* name;
    int expected;
  };
  for (const Row& row : {Row{"inclusion", 1}, Row{"reflected", 1}, Row{"minus_inclusion", 1},
                         Row{"bumpy_sphere", 1}, Row{"ellipsoid", 1}}) {
    const DegreeResult deg = degree(gauss_sphere_map(catalog::make(row.name)), mesh);
    CHECK(deg.rounded == row.expected);
    CHECK(deg.residual < 0.1);
  }
}

TEST_CASE("degree is stable across mesh refinement") {
  const Immersion bumpy = catalog::make("bumpy_sphere");
  int previous = 0;
  for (int level : {3, 4, 5}) {
    const DegreeResult deg = degree(gauss_sphere_map(bumpy), SphereMesh::icosphere(level));
    if (level > 3) CHECK(deg.rounded == previous);
    previous = deg.rounded;
    CHECK(deg.residual < 0.1);
  }
  CHECK(previous == 1);
}

TEST_CASE("degree composition law deg(nu_{f o g}) = deg(g)^n deg(nu_f)") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  const Immersion f = catalog::make("ellipsoid");
  const int base = degree(gauss_sphere_map(f), mesh).rounded;
  for (const auto& g : {SphereDiffeo::identity(2), SphereDiffeo::reflection(2),
                        SphereDiffeo::antipodal(2)}) {
    const Immersion fg = precompose(f, g);
    const int composed = degree(gauss_sphere_map(fg), mesh).rounded;
    const int factor = g.degree * g.degree;  // deg(g)^n at n = 2
    REQUIRE(composed == factor * base);
  }
}

TEST_CASE("degree of the flat Gauss map of the bumpy hyperbolic sphere") {
  const SphereMesh mesh = SphereMesh::icosphere(4);
  const auto deg = degree(flat_gauss_sphere_map(catalog::make("bumpy_halfspace_sphere")), mesh);
  CHECK(deg.rounded == 1);
}

TEST_CASE("orientation class predictions") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  SECTION("Euclidean, I < 0, n = 2: preserving") {
    CHECK(orientation_class(catalog::make("inclusion"), CurvatureInterval(-2.0, -0.5), mesh) ==
          OrientationClass::Preserving);
  }
  SECTION("Euclidean, I > 0, n = 3: reversing (prediction only)") {
    CHECK(predicted_orientation_class(3, CurvatureInterval(0.5, 2.0), 0.0) ==
          OrientationClass::Reversing);
    CHECK(predicted_orientation_class(2, CurvatureInterval(0.5, 2.0), 0.0) ==
          OrientationClass::Preserving);
  }
  SECTION("half-space, I < -kappa, n = 2: preserving") {
    CHECK(orientation_class(catalog::make("halfspace_sphere", {{"mu", -2.0}}),
                            CurvatureInterval(-3.0, -1.5), mesh) == OrientationClass::Preserving);
  }
  SECTION("hyperbolic, I > kappa, n = 2: still preserving") {
    CHECK(orientation_class(catalog::make("reflected_halfspace_sphere", {{"mu", -2.0}}),
                            CurvatureInterval(1.5, 3.0), mesh) == OrientationClass::Preserving);
  }
  SECTION("I must be disjoint and must hold the curvatures") {
    CHECK_THROWS_AS(predicted_orientation_class(2, CurvatureInterval(-2.0, 0.5), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(orientation_class(catalog::make("halfspace_sphere", {{"mu", -2.0}}),
                                      CurvatureInterval(-1.8, -1.2), mesh),
                    std::runtime_error);
  }
}
