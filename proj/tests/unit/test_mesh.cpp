#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "sphereform/mesh.hpp"
#include "test_helpers.hpp"

using namespace sphereform;
using Catch::Approx;

TEST_CASE("icosphere sizes and weights") {
  for (int level : {3, 4, 5}) {
    const SphereMesh mesh = SphereMesh::icosphere(level);
    CHECK(static_cast<int>(mesh.size()) == 10 * (1 << (2 * level)) + 2);
    CHECK(static_cast<int>(mesh.triangles.size()) == 20 * (1 << (2 * level)));
    for (const auto& v : mesh.vertices) REQUIRE(v.norm() == Approx(1.0).margin(1e-14));
    // spherical-excess weights tile the sphere
    REQUIRE(mesh.total_weight() == Approx(4.0 * std::numbers::pi).margin(1e-10));
    for (double w : mesh.weights) REQUIRE(w > 0.0);
  }
}

TEST_CASE("icosphere triangles are outward oriented") {
  const SphereMesh mesh = SphereMesh::icosphere(2);
  for (const auto& t : mesh.triangles) {
    Eigen::Matrix3d M;
    M.col(0) = mesh.vertices[t[0]];
    M.col(1) = mesh.vertices[t[1]];
    M.col(2) = mesh.vertices[t[2]];
    REQUIRE(M.determinant() > 0.0);
  }
}

TEST_CASE("chart assignment of mesh vertices is consistent") {
  const SphereMesh mesh = SphereMesh::icosphere(3);
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    REQUIRE((sphere_point(mesh.charts[v]) - mesh.vertices[v]).norm() < 1e-13);
    REQUIRE(mesh.charts[v].x.norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("chart-grid mesh covers S^n with partition-of-unity weights") {
  SECTION("n = 2 cross-check against the exact area") {
    const SphereMesh mesh = SphereMesh::chart_grid(2, 3);
    REQUIRE(mesh.total_weight() == Approx(4.0 * std::numbers::pi).margin(1e-4));
  }
  SECTION("n = 3 volume") {
    const SphereMesh mesh = SphereMesh::chart_grid(3, 3);
    REQUIRE(mesh.total_weight() == Approx(2.0 * std::numbers::pi * std::numbers::pi).margin(1e-4));
  }
  SECTION("quadrature of a smooth function, n = 2") {
    // integral of (x3)^2 over S^2 is 4 pi / 3
    const SphereMesh mesh = SphereMesh::chart_grid(2, 3);
    double integral = 0.0;
    for (std::size_t v = 0; v < mesh.size(); ++v)
      integral += mesh.weights[v] * mesh.vertices[v](2) * mesh.vertices[v](2);
    REQUIRE(integral == Approx(4.0 * std::numbers::pi / 3.0).margin(1e-4));
  }
}
