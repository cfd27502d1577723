#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "sphereform/shape.hpp"

namespace sphereform {

// ---------------------------------------------------------------------------
// The modified Gauss maps.
// ---------------------------------------------------------------------------

/// Flat Gauss map value at p: the Euclidean normalization of the half-space
/// model normal (nu = kappa f^{n+1} nu_bar).
inline Vec flat_gauss(const Immersion& f, const ChartPoint& p) {
  if (f.model.kind != ModelKind::HalfSpace)
    throw std::invalid_argument("flat_gauss: immersion must live in the half-space model");
  return euclidean_unit_normal(f, jet(f, p));
}

/// Visual Gauss map value: ideal endpoint of the normal ray, in ball-boundary
/// coordinates.
inline BoundaryPoint visual_gauss(const Immersion& f, const ChartPoint& p) {
  if (!f.model.hyperbolic())
    throw std::invalid_argument("visual_gauss: immersion must be hyperbolic");
  const Jet2Sample j = jet(f, p);
  return ideal_endpoint(f.model, j.value, unit_normal(f, j));
}

/// Check Gauss map value: ideal endpoint of the ray issuing from -nu.
inline BoundaryPoint check_gauss(const Immersion& f, const ChartPoint& p) {
  if (!f.model.hyperbolic())
    throw std::invalid_argument("check_gauss: immersion must be hyperbolic");
  const Jet2Sample j = jet(f, p);
  return ideal_endpoint(f.model, j.value, -unit_normal(f, j));
}

/// Residual of the flat-Gauss derivative identity at a principal pair
/// (u, lambda):
///   | d nu_bar(u) - ((nu_bar^{n+1} - lambda/kappa)/f^{n+1}) df(u) |
/// with d nu_bar by 4th-order finite differences in the chart.
inline double flat_gauss_derivative_residual(const Immersion& f, const ChartPoint& p, const Vec& u,
                                             double lambda) {
  if (f.model.kind != ModelKind::HalfSpace)
    throw std::invalid_argument("flat_gauss_derivative_residual: half-space model required");
  const Jet2Sample j = jet(f, p);
  const Vec nu_bar = euclidean_unit_normal(f, j);
  const int last = f.model.ambient_dim - 1;

  const double h = 1e-4 * std::max(1.0, p.x.norm()) / std::max(1.0, u.norm());
  auto nb = [&](double t) {
    return euclidean_unit_normal(f, jet(f, ChartPoint(p.chart, p.x + t * u)));
  };
  const Vec dnb = (-nb(2 * h) + 8 * nb(h) - 8 * nb(-h) + nb(-2 * h)) / (12 * h);

  const double factor = (nu_bar(last) - lambda / f.model.kappa) / j.value(last);
  return (dnb - factor * (j.d1 * u)).norm();
}

// ---------------------------------------------------------------------------
// Sphere self-maps: Jacobian fields and topological degree.
// ---------------------------------------------------------------------------

/// A map S^n -> S^n (or to the ideal boundary sphere), evaluable at any unit
/// vector; sampled over meshes on demand. The underlying immersion, when
/// present, supplies induced-metric source frames.
struct SphereMap {
  std::string name;
  std::function<Vec(const Vec&)> eval;
  std::shared_ptr<const Immersion> source;  // optional
  double fd_angle = 1e-4;                   // finite-difference arc step
};

inline SphereMap gauss_sphere_map(const Immersion& f, const std::string& name = "nu") {
  if (f.model.kind != ModelKind::Euclidean)
    throw std::invalid_argument("gauss_sphere_map: Euclidean target identification requires E^{n+1}");
  SphereMap m;
  m.name = name;
  m.source = std::make_shared<Immersion>(f);
  auto src = m.source;
  m.eval = [src](const Vec& p) {
    const ChartPoint c = chart_of(p);
    return unit_normal(*src, jet(*src, c));
  };
  return m;
}

inline SphereMap flat_gauss_sphere_map(const Immersion& f, const std::string& name = "nu_bar") {
  SphereMap m;
  m.name = name;
  m.source = std::make_shared<Immersion>(f);
  auto src = m.source;
  m.eval = [src](const Vec& p) { return flat_gauss(*src, chart_of(p)); };
  return m;
}

inline SphereMap visual_gauss_sphere_map(const Immersion& f, const std::string& name = "nu_hat") {
  SphereMap m;
  m.name = name;
  m.source = std::make_shared<Immersion>(f);
  auto src = m.source;
  m.eval = [src](const Vec& p) { return visual_gauss(*src, chart_of(p)); };
  return m;
}

inline SphereMap check_gauss_sphere_map(const Immersion& f, const std::string& name = "nu_check") {
  SphereMap m;
  m.name = name;
  m.source = std::make_shared<Immersion>(f);
  auto src = m.source;
  m.eval = [src](const Vec& p) { return check_gauss(*src, chart_of(p)); };
  return m;
}

/// Positively oriented round orthonormal frame of T_p S^n (columns), i.e.
/// det[u_1,...,u_n, p] > 0.
inline Mat tangent_frame(const Vec& p) {
  const int d = static_cast<int>(p.size());
  Mat F(d, d);
  F.col(d - 1) = p;
  // complete with the coordinate axes least aligned with p
  int filled = 0;
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(p(a)) < std::abs(p(b)); });
  for (int idx : order) {
    if (filled == d - 1) break;
    Vec v = Vec::Zero(d);
    v(idx) = 1.0;
    for (int c = d - 1; c > filled; --c) v -= v.dot(F.col(c)) * F.col(c);
    for (int c = 0; c < filled; ++c) v -= v.dot(F.col(c)) * F.col(c);
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    F.col(filled++) = v / nv;
  }
  if (filled != d - 1) throw std::runtime_error("tangent_frame: failed to complete frame");
  Mat frame = F.leftCols(d - 1);
  Mat test(d, d);
  test.leftCols(d - 1) = frame;
  test.col(d - 1) = p;
  if (test.determinant() < 0) frame.col(0) = -frame.col(0);
  return frame;
}

enum class FrameKind { Round, Induced };

/// Differential of the sphere map at p in the given source frame (columns of
/// `frame`, tangent at p) and a positively oriented round orthonormal frame
/// at the image; finite differences along great circles.
inline Mat map_jacobian(const SphereMap& map, const Vec& p, const Mat& frame) {
  const Vec q = map.eval(p);
  const Mat target = tangent_frame(q);
  const int n = static_cast<int>(frame.cols());
  Mat J(n, n);
  const double eps = map.fd_angle;
  for (int b = 0; b < n; ++b) {
    const double len = frame.col(b).norm();
    const Vec dir = frame.col(b) / len;
    auto val = [&](double t) {
      const double a = t * len;  // velocity frame.col(b) at t = 0
      Vec c = std::cos(a) * p + std::sin(a) * dir;
      return map.eval(c / c.norm());
    };
    Vec d = (-val(2 * eps) + 8 * val(eps) - 8 * val(-eps) + val(-2 * eps)) / (12 * eps);
    d -= d.dot(q) * q;
    J.col(b) = target.transpose() * d;
  }
  return J;
}

struct JacobianSample {
  double det = 0.0;
  bool certified = false;  // |det| above tolerance
};

struct JacobianField {
  std::vector<JacobianSample> samples;
  double min_abs_det = 0.0;
  int sign = 0;  // +1 / -1 when all certified with a constant sign, else 0
  bool all_certified = false;
};

/// Per-vertex Jacobian determinants of the map. Source frames are round
/// orthonormal, or g-orthonormal from the underlying immersion (Induced);
/// both are positively oriented, so the sign of det is frame-independent.
inline JacobianField jacobian_field(const SphereMap& map, const SphereMesh& mesh,
                                    FrameKind frame_kind = FrameKind::Induced,
                                    double det_tol = 1e-8) {
  if (frame_kind == FrameKind::Induced && !map.source) frame_kind = FrameKind::Round;
  JacobianField out;
  out.samples.resize(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) {
    const Vec& p = mesh.vertices[v];
    Mat frame;
    if (frame_kind == FrameKind::Round) {
      frame = tangent_frame(p);
    } else {
      const ShapeData sd = shape_data(*map.source, mesh.charts[v]);
      const MapJet param = sphere_param_jet(mesh.charts[v]);
      frame = param.J * sd.directions;  // g-orthonormal, pushed to T_p S^n
      Mat test(p.size(), p.size());
      test.leftCols(p.size() - 1) = frame;
      test.col(p.size() - 1) = p;
      if (test.determinant() < 0) frame.col(0) = -frame.col(0);
    }
    const Mat J = map_jacobian(map, p, frame);
    const double det = J.determinant();
    out.samples[v] = {det, std::abs(det) >= det_tol};
  });
  out.all_certified = true;
  out.min_abs_det = std::numeric_limits<double>::infinity();
  bool pos = false, neg = false;
  for (const auto& s : out.samples) {
    out.all_certified = out.all_certified && s.certified;
    out.min_abs_det = std::min(out.min_abs_det, std::abs(s.det));
    (s.det > 0 ? pos : neg) = true;
  }
  out.sign = (out.all_certified && pos != neg) ? (pos ? 1 : -1) : 0;
  return out;
}

struct DegreeResult {
  std::string map;
  int mesh_level = 0;
  double raw = 0.0;
  int rounded = 0;
  double residual = 0.0;
};

/// Topological degree by quadrature of the Jacobian determinant in round
/// frames: deg = (1/omega_n) * sum w_v det J_v, omega_2 = 4 pi. Throws when
/// the quadrature residual reaches 0.1 (unresolved degree).
inline DegreeResult degree(const SphereMap& map, const SphereMesh& mesh) {
  if (mesh.n != 2) throw std::invalid_argument("degree: quadrature mesh must be an icosphere (n = 2)");
  std::vector<double> dets(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) {
    dets[v] = map_jacobian(map, mesh.vertices[v], tangent_frame(mesh.vertices[v])).determinant();
  });
  double integral = 0.0;
  for (std::size_t v = 0; v < mesh.size(); ++v) integral += mesh.weights[v] * dets[v];
  DegreeResult r;
  r.map = map.name;
  r.mesh_level = mesh.level;
  r.raw = integral / (4.0 * std::numbers::pi);
  r.rounded = static_cast<int>(std::lround(r.raw));
  r.residual = std::abs(r.raw - r.rounded);
  if (r.residual >= 0.1)
    throw std::runtime_error("degree: unresolved (quadrature residual " + std::to_string(r.residual) + ")");
  return r;
}

// ---------------------------------------------------------------------------
// Orientation class of the modified Gauss map.
// ---------------------------------------------------------------------------

enum class OrientationClass { Preserving, Reversing };

inline std::string to_string(OrientationClass c) {
  return c == OrientationClass::Preserving ? "preserving" : "reversing";
}

/// Predicted orientation class of the modified Gauss map for I disjoint from
/// [-kappa, kappa]: reversing exactly when n is odd and I > kappa.
inline OrientationClass predicted_orientation_class(int n, const CurvatureInterval& I, double kappa) {
  if (I.classify(kappa) != IntervalPosition::Disjoint)
    throw std::invalid_argument("orientation_class: I must be disjoint from [-kappa, kappa]");
  const bool reversing = (n % 2 == 1) && I.entirely_above(kappa);
  return reversing ? OrientationClass::Reversing : OrientationClass::Preserving;
}

/// Orientation class of f's modified Gauss map (nu for Euclidean, nu_bar for
/// hyperbolic), predicted from (n, side of I) and cross-checked against the
/// pointwise Jacobian signs when n = 2. Curvatures outside I, or a sign
/// mismatch, raise errors.
inline OrientationClass orientation_class(const Immersion& f, const CurvatureInterval& I,
                                          const SphereMesh& mesh) {
  const double kappa = f.model.kappa;
  const OrientationClass predicted = predicted_orientation_class(f.model.n(), I, kappa);
  const CurvatureRange range = curvature_range(f, mesh, I);
  if (!range.inside)
    throw std::runtime_error("orientation_class: sampled curvature range violates I");
  if (f.model.n() != 2) return predicted;  // numeric check at n = 2 only

  SphereMap map;
  if (f.model.kind == ModelKind::Euclidean) {
    map = gauss_sphere_map(f);
  } else {
    const Immersion in_half =
        convert_immersion(f, SpaceFormModel::half_space(f.model.ambient_dim, kappa));
    map = flat_gauss_sphere_map(in_half);
  }
  const JacobianField jf = jacobian_field(map, mesh, FrameKind::Round);
  if (jf.sign == 0)
    throw std::runtime_error("orientation_class: Jacobian field not single-signed");
  const OrientationClass observed =
      jf.sign > 0 ? OrientationClass::Preserving : OrientationClass::Reversing;
  if (observed != predicted)
    throw std::runtime_error("orientation_class: observed sign contradicts the prediction");
  return predicted;
}

}  // namespace sphereform
