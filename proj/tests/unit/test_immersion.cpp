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

TEST_CASE("exact jets agree with finite-difference jets") {
  for (const char* name : {"inclusion", "ellipsoid", "bumpy_sphere", "halfspace_sphere",
                           "ball_sphere", "bumpy_halfspace_sphere", "bumpy_ball_sphere"}) {
    const Immersion f = catalog::make(name);
    REQUIRE(f.has_exact_jet());
    Immersion fd_only = f;
    fd_only.exact_jet = nullptr;
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      const Jet2Sample exact = jet(f, p);
      const Jet2Sample fd = jet(fd_only, p);
      REQUIRE((exact.value - fd.value).norm() < 1e-12);
      REQUIRE((exact.d1 - fd.d1).cwiseAbs().maxCoeff() < 1e-5);
      for (std::size_t a = 0; a < exact.d2.size(); ++a)
        REQUIRE((exact.d2[a] - fd.d2[a]).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("finite-difference d2 is symmetric") {
  Immersion f = catalog::make("bumpy_sphere", {{"eps", 0.05}});
  f.exact_jet = nullptr;
  for (int trial = 0; trial < 10; ++trial) {
    const Jet2Sample j = jet(f, random_chart_point());
    for (const Mat& d2a : j.d2) REQUIRE((d2a - d2a.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("constant maps are rejected with the singular value attached") {
  Immersion constant;
  constant.model = SpaceFormModel::euclidean(3);
  Vec c(3);
  c << 0.2, -0.1, 0.5;
  constant.eval = [c](const ChartPoint&) { return c; };
  try {
    jet(constant, ChartPoint(ChartId::North, Vec::Zero(2)));
    FAIL("expected NotImmersionError");
  } catch (const NotImmersionError& e) {
    CHECK(e.sigma_min < 1e-10);
  }
}

TEST_CASE("unit normal of the inclusion is the identity") {
  const Immersion iota = catalog::make("inclusion");
  for (int trial = 0; trial < 20; ++trial) {
    const ChartPoint p = random_chart_point();
    const Vec nu = unit_normal(iota, jet(iota, p));
    REQUIRE((nu - sphere_point(p)).norm() < 1e-12);
  }
}

TEST_CASE("unit normal of minus inclusion at n = 2 is the identity map") {
  // nu_{-iota}(p) = (-1)^n p; at n = 2 the normal at domain point p is p
  // (the inward normal at the image point -p).
  const Immersion minus = catalog::make("minus_inclusion");
  for (int trial = 0; trial < 10; ++trial) {
    const ChartPoint p = random_chart_point();
    const Vec nu = unit_normal(minus, jet(minus, p));
    REQUIRE((nu - sphere_point(p)).norm() < 1e-11);
  }
}

TEST_CASE("half-space sphere: flat-normalized normal is the identity") {
  const Immersion sigma = catalog::make("halfspace_sphere", {{"mu", -2.0}, {"kappa", 1.0}});
  for (int trial = 0; trial < 10; ++trial) {
    const ChartPoint p = random_chart_point();
    const Jet2Sample j = jet(sigma, p);
    const Vec nu_bar = euclidean_unit_normal(sigma, j);
    REQUIRE((nu_bar - sphere_point(p)).norm() < 1e-12);
    // model normal has unit model norm and equals kappa f^{n+1} nu_bar
    const Vec nu = unit_normal(sigma, j);
    CHECK(metric_norm(sigma.model, j.value, nu) == Approx(1.0).margin(1e-12));
    REQUIRE((nu - j.value(2) * nu_bar).norm() < 1e-12);
  }
}

TEST_CASE("normals transport correctly through model conversions") {
  const Immersion sigma = catalog::make("ball_sphere", {{"mu", -2.0}, {"kappa", 1.0}});
  for (ModelKind target : {ModelKind::HalfSpace, ModelKind::Hyperboloid}) {
    const SpaceFormModel to(target, 3, 1.0);
    const Immersion converted = convert_immersion(sigma, to);
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      const Jet2Sample j = jet(sigma, p);
      const Vec nu = unit_normal(sigma, j);
      const MapJet C = convert_jet(sigma.model, to, j.value);
      const Vec nu_converted = C.J * nu;
      const Vec nu_direct = unit_normal(converted, jet(converted, p));
      REQUIRE((nu_converted - nu_direct).norm() < 1e-10);
    }
  }
}

TEST_CASE("normal composition law through diffeomorphisms") {
  // nu_{f o g} = deg(g) nu_f o g for g in {id, reflection, antipodal}
  const Immersion f = catalog::make("bumpy_sphere", {{"eps", 0.05}});
  for (const auto& g : {SphereDiffeo::identity(2), SphereDiffeo::reflection(2),
                        SphereDiffeo::antipodal(2)}) {
    const Immersion fg = precompose(f, g);
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint p = random_chart_point();
      const Vec lhs = unit_normal(fg, jet(fg, p));
      const Vec rhs = g.degree * unit_normal(f, jet(f, g.map(p)));
      REQUIRE((lhs - rhs).norm() < 1e-8);
    }
  }
}

TEST_CASE("precompose chains exact jets") {
  const Immersion f = catalog::make("ellipsoid");
  const Immersion fr = precompose(f, SphereDiffeo::antipodal(2));
  Immersion fd = fr;
  fd.exact_jet = nullptr;
  for (int trial = 0; trial < 5; ++trial) {
    const ChartPoint p = random_chart_point();
    const Jet2Sample a = jet(fr, p), b = jet(fd, p);
    REQUIRE((a.d1 - b.d1).cwiseAbs().maxCoeff() < 1e-6);
    for (std::size_t c = 0; c < a.d2.size(); ++c)
      REQUIRE((a.d2[c] - b.d2[c]).cwiseAbs().maxCoeff() < 1e-5);
  }
}
