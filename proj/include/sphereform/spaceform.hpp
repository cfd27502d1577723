#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "sphereform/linalg.hpp"

namespace sphereform {

enum class ModelKind { Euclidean, HalfSpace, Ball, Hyperboloid };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Euclidean: return "euclidean";
    case ModelKind::HalfSpace: return "halfspace";
    case ModelKind::Ball: return "ball";
    case ModelKind::Hyperboloid: return "hyperboloid";
  }
  return "?";
}

/// Ambient geometry descriptor: Euclidean E^{n+1} (kappa = 0) or a model of
/// hyperbolic space of sectional curvature -kappa^2.
///
/// Coordinate conventions:
///   HalfSpace   — {x in R^{n+1} : x_{n+1} > 0}, metric (1/(kappa q))^2 delta,
///                 q the last coordinate.
///   Ball        — unit ball, metric (2/(kappa (1-|x|^2)))^2 delta.
///   Hyperboloid — {X in R^{n+2} : <X,X>_L = -1/kappa^2, X_{n+2} > 0} with the
///                 Lorentz form x_1^2+...+x_{n+1}^2 - x_{n+2}^2.
struct SpaceFormModel {
  ModelKind kind = ModelKind::Euclidean;
  int ambient_dim = 3;  // n+1
  double kappa = 0.0;   // curvature is -kappa^2

  SpaceFormModel() = default;
  SpaceFormModel(ModelKind k, int dim, double ka) : kind(k), ambient_dim(dim), kappa(ka) {
    if (ambient_dim < 3) throw std::invalid_argument("SpaceFormModel: ambient_dim must be >= 3");
    const bool euclid = (kind == ModelKind::Euclidean);
    if (euclid && kappa != 0.0)
      throw std::invalid_argument("SpaceFormModel: Euclidean requires kappa = 0");
    if (!euclid && !(kappa > 0.0))
      throw std::invalid_argument("SpaceFormModel: hyperbolic models require kappa > 0");
  }

  static SpaceFormModel euclidean(int dim) { return SpaceFormModel(ModelKind::Euclidean, dim, 0.0); }
  static SpaceFormModel half_space(int dim, double kappa) { return SpaceFormModel(ModelKind::HalfSpace, dim, kappa); }
  static SpaceFormModel ball(int dim, double kappa) { return SpaceFormModel(ModelKind::Ball, dim, kappa); }
  static SpaceFormModel hyperboloid(int dim, double kappa) { return SpaceFormModel(ModelKind::Hyperboloid, dim, kappa); }

  int n() const { return ambient_dim - 1; }
  /// Length of a coordinate vector in this model's chart.
  int coord_dim() const { return kind == ModelKind::Hyperboloid ? ambient_dim + 1 : ambient_dim; }
  bool hyperbolic() const { return kind != ModelKind::Euclidean; }

  bool operator==(const SpaceFormModel& o) const {
    return kind == o.kind && ambient_dim == o.ambient_dim && kappa == o.kappa;
  }
};

/// Membership of p in the model's coordinate domain, checked to `tol`.
inline bool point_in_domain(const SpaceFormModel& m, const AmbientPoint& p, double tol = 1e-12) {
  if (p.size() != m.coord_dim()) return false;
  switch (m.kind) {
    case ModelKind::Euclidean: return true;
    case ModelKind::HalfSpace: return p(m.ambient_dim - 1) > tol;
    case ModelKind::Ball: return p.norm() < 1.0 - tol;
    case ModelKind::Hyperboloid: {
      // the quadric residual loses precision quadratically in the coordinate
      // size, so the gate scales with |p|^2
      const double q = detail::lorentz_dot(p, p);
      const double target = -1.0 / (m.kappa * m.kappa);
      const double scale = std::max(std::abs(target), p.squaredNorm());
      return std::abs(q - target) <= std::max(tol, tol * scale) * 1e4 &&
             p(m.coord_dim() - 1) > 0.0;
    }
  }
  return false;
}

inline void validate_point(const SpaceFormModel& m, const AmbientPoint& p, double tol = 1e-12) {
  if (!point_in_domain(m, p, tol))
    throw std::domain_error("point outside " + to_string(m.kind) + " model domain");
}

/// Riemannian metric in model coordinates. For the hyperboloid this is the
/// ambient Lorentz form, whose restriction to the tangent space is the
/// induced metric.
inline Mat metric_tensor(const SpaceFormModel& m, const AmbientPoint& p) {
  validate_point(m, p);
  const int d = m.coord_dim();
  switch (m.kind) {
    case ModelKind::Euclidean: return Mat::Identity(d, d);
    case ModelKind::HalfSpace: {
      const double c = 1.0 / (m.kappa * p(d - 1));
      return (c * c) * Mat::Identity(d, d);
    }
    case ModelKind::Ball: {
      const double c = 2.0 / (m.kappa * (1.0 - p.squaredNorm()));
      return (c * c) * Mat::Identity(d, d);
    }
    case ModelKind::Hyperboloid: return detail::lorentz_form(d);
  }
  throw std::logic_error("unreachable");
}

/// Conformal factor c(p) for the models with metric c^2 * delta.
inline double conformal_factor(const SpaceFormModel& m, const AmbientPoint& p) {
  switch (m.kind) {
    case ModelKind::Euclidean: return 1.0;
    case ModelKind::HalfSpace: return 1.0 / (m.kappa * p(m.ambient_dim - 1));
    case ModelKind::Ball: return 2.0 / (m.kappa * (1.0 - p.squaredNorm()));
    default: throw std::invalid_argument("conformal_factor: hyperboloid is not conformal to R^{n+1}");
  }
}

/// Inner product of coordinate vectors a, b at p.
inline double metric_dot(const SpaceFormModel& m, const AmbientPoint& p, const Vec& a, const Vec& b) {
  if (m.kind == ModelKind::Hyperboloid) return detail::lorentz_dot(a, b);
  const double c = conformal_factor(m, p);
  return c * c * a.dot(b);
}

inline double metric_norm(const SpaceFormModel& m, const AmbientPoint& p, const Vec& v) {
  return std::sqrt(std::max(0.0, metric_dot(m, p, v, v)));
}

struct Christoffel {
  // symbols(k)(i,j) = Gamma^k_{ij}
  std::vector<Mat> symbols;
  const Mat& operator[](int k) const { return symbols[k]; }
  int dim() const { return static_cast<int>(symbols.size()); }

  /// Contraction Gamma(a, b)^k = Gamma^k_{ij} a^i b^j.
  Vec contract(const Vec& a, const Vec& b) const {
    Vec out(dim());
    for (int k = 0; k < dim(); ++k) out(k) = a.dot(symbols[k] * b);
    return out;
  }
};

/// Christoffel symbols in model coordinates. Euclidean and hyperboloid
/// (ambient Lorentz chart) coordinates are affine: all symbols vanish. The
/// conformal models use Gamma^k_ij = d_i phi delta_jk + d_j phi delta_ik
/// - d_k phi delta_ij for metric e^{2 phi} delta.
inline Christoffel christoffel(const SpaceFormModel& m, const AmbientPoint& p) {
  validate_point(m, p);
  const int d = m.coord_dim();
  Christoffel out;
  out.symbols.assign(d, Mat::Zero(d, d));
  if (m.kind == ModelKind::Euclidean || m.kind == ModelKind::Hyperboloid) return out;

  Vec grad_phi(d);
  if (m.kind == ModelKind::HalfSpace) {
    grad_phi.setZero();
    grad_phi(d - 1) = -1.0 / p(d - 1);
  } else {  // Ball
    grad_phi = 2.0 * p / (1.0 - p.squaredNorm());
  }
  for (int k = 0; k < d; ++k) {
    Mat& G = out.symbols[k];
    for (int i = 0; i < d; ++i) {
      G(i, k) += grad_phi(i);
      G(k, i) += grad_phi(i);
      G(i, i) -= grad_phi(k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model conversions.
//
// The hyperboloid is the interchange model (its geodesics are exact). The
// fixed normalizations: the ball origin, the half-space point (0,..,0,1/kappa)
// and the hyperboloid basepoint (0,..,0,1/kappa) all correspond, and every
// conversion is an orientation-preserving isometry (the half-space <-> ball
// Cayley inversion is composed with a reflection in the first coordinate to
// preserve orientation).
// ---------------------------------------------------------------------------

namespace detail {

// Inversion psi(y) = -e + 2(y+e)/|y+e|^2 (e = last basis vector); an
// involution exchanging the unit ball and the upper half space (kappa = 1).
inline MapJet inversion_jet(const Vec& y) {
  const int d = static_cast<int>(y.size());
  Vec e = Vec::Zero(d);
  e(d - 1) = 1.0;
  const Vec w = y + e;
  const double r2 = w.squaredNorm();
  if (r2 == 0.0) throw std::domain_error("inversion: singular point");
  MapJet out;
  out.value = -e + 2.0 * w / r2;
  out.J = (2.0 / r2) * (Mat::Identity(d, d) - (2.0 / r2) * (w * w.transpose()));
  out.H.assign(d, Mat::Zero(d, d));
  const double inv4 = 1.0 / (r2 * r2);
  const double inv6 = inv4 / r2;
  for (int a = 0; a < d; ++a) {
    Mat& Ha = out.H[a];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double t = 0.0;
        if (i == a) t += w(j);
        if (j == a) t += w(i);
        if (i == j) t += w(a);
        Ha(i, j) = -4.0 * inv4 * t + 16.0 * inv6 * w(a) * w(i) * w(j);
      }
  }
  return out;
}

// Reflection in the first coordinate (orientation fix for the Cayley map).
inline MapJet flip_first_jet(const Vec& x) {
  const int d = static_cast<int>(x.size());
  Mat R = Mat::Identity(d, d);
  R(0, 0) = -1.0;
  return MapJet::affine(R, Vec::Zero(d), x);
}

inline MapJet scale_jet(double c, const Vec& x) {
  const int d = static_cast<int>(x.size());
  return MapJet::affine(c * Mat::Identity(d, d), Vec::Zero(d), x);
}

// Ball -> hyperboloid: X(b) = (1/kappa) (2b, 1+|b|^2) / (1-|b|^2).
inline MapJet ball_to_hyperboloid_jet(double kappa, const Vec& b) {
  const int m = static_cast<int>(b.size());
  const double D = 1.0 - b.squaredNorm();
  if (D <= 0.0) throw std::domain_error("ball point outside unit ball");
  MapJet out;
  out.value.resize(m + 1);
  out.value.head(m) = (2.0 / kappa) * b / D;
  out.value(m) = (1.0 / kappa) * (1.0 + b.squaredNorm()) / D;
  out.J.resize(m + 1, m);
  out.H.assign(m + 1, Mat::Zero(m, m));
  const double D2 = D * D, D3 = D2 * D;
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i)
      out.J(a, i) = (2.0 / kappa) * ((a == i ? 1.0 : 0.0) / D + 2.0 * b(a) * b(i) / D2);
  for (int i = 0; i < m; ++i) out.J(m, i) = (4.0 / kappa) * b(i) / D2;
  for (int a = 0; a < m; ++a) {
    Mat& Ha = out.H[a];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double t = 0.0;
        if (a == i) t += 2.0 * b(j) / D2;
        if (a == j) t += 2.0 * b(i) / D2;
        if (i == j) t += 2.0 * b(a) / D2;
        Ha(i, j) = (2.0 / kappa) * (t + 8.0 * b(a) * b(i) * b(j) / D3);
      }
  }
  Mat& Hm = out.H[m];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      Hm(i, j) = (4.0 / kappa) * ((i == j ? 1.0 : 0.0) / D2 + 4.0 * b(i) * b(j) / D3);
  return out;
}

// Hyperboloid -> ball: b(X) = kappa x / (1 + kappa t), X = (x, t).
inline MapJet hyperboloid_to_ball_jet(double kappa, const Vec& X) {
  const int m = static_cast<int>(X.size()) - 1;
  const double t = X(m);
  const double s = 1.0 + kappa * t;
  if (s <= 0.0) throw std::domain_error("hyperboloid point on wrong sheet");
  MapJet out;
  out.value = kappa * X.head(m) / s;
  out.J = Mat::Zero(m, m + 1);
  out.H.assign(m, Mat::Zero(m + 1, m + 1));
  for (int a = 0; a < m; ++a) {
    out.J(a, a) = kappa / s;
    out.J(a, m) = -kappa * kappa * X(a) / (s * s);
    Mat& Ha = out.H[a];
    Ha(a, m) = Ha(m, a) = -kappa * kappa / (s * s);
    Ha(m, m) = 2.0 * std::pow(kappa, 3) * X(a) / (s * s * s);
  }
  return out;
}

}  // namespace detail

/// Exact 2-jet of the conversion map `from` -> `to` at p. Requires matching
/// curvature; both models hyperbolic (or both Euclidean, where only the
/// identity conversion exists).
inline MapJet convert_jet(const SpaceFormModel& from, const SpaceFormModel& to, const AmbientPoint& p) {
  if (from.kappa != to.kappa || from.ambient_dim != to.ambient_dim)
    throw std::invalid_argument("convert: model mismatch (kappa or dimension)");
  validate_point(from, p);
  const int d = from.coord_dim();
  if (from.kind == to.kind) return MapJet::affine(Mat::Identity(d, d), Vec::Zero(d), p);
  if (!from.hyperbolic() || !to.hyperbolic())
    throw std::invalid_argument("convert: only hyperbolic models interconvert");
  const double kappa = from.kappa;

  using detail::ball_to_hyperboloid_jet;
  using detail::flip_first_jet;
  using detail::hyperboloid_to_ball_jet;
  using detail::inversion_jet;
  using detail::scale_jet;

  // Ball <-> half-space Cayley map, orientation-preserving:
  //   ball -> halfspace: z = (1/kappa) psi(R b)
  //   halfspace -> ball: b = R psi(kappa z)
  auto ball_to_half = [&](const Vec& b) {
    MapJet r = flip_first_jet(b);
    r = MapJet::compose(inversion_jet(r.value), r);
    return MapJet::compose(scale_jet(1.0 / kappa, r.value), r);
  };
  auto half_to_ball = [&](const Vec& z) {
    MapJet r = scale_jet(kappa, z);
    r = MapJet::compose(inversion_jet(r.value), r);
    return MapJet::compose(flip_first_jet(r.value), r);
  };

  switch (from.kind) {
    case ModelKind::Ball:
      if (to.kind == ModelKind::Hyperboloid) return ball_to_hyperboloid_jet(kappa, p);
      return ball_to_half(p);
    case ModelKind::HalfSpace: {
      MapJet b = half_to_ball(p);
      if (to.kind == ModelKind::Ball) return b;
      return MapJet::compose(ball_to_hyperboloid_jet(kappa, b.value), b);
    }
    case ModelKind::Hyperboloid: {
      MapJet b = hyperboloid_to_ball_jet(kappa, p);
      if (to.kind == ModelKind::Ball) return b;
      return MapJet::compose(ball_to_half(b.value), b);
    }
    default: break;
  }
  throw std::logic_error("unreachable");
}

/// Isometric change of model coordinates.
inline AmbientPoint convert(const AmbientPoint& p, const SpaceFormModel& from, const SpaceFormModel& to) {
  return convert_jet(from, to, p).value;
}

/// Riemannian exponential map. Hyperboloid rays are closed-form; half-space
/// and ball route through the hyperboloid.
inline AmbientPoint exp_map(const SpaceFormModel& m, const AmbientPoint& p, const Vec& v) {
  validate_point(m, p);
  if (v.size() != m.coord_dim()) throw std::invalid_argument("exp_map: tangent dimension mismatch");
  if (v.norm() == 0.0) return p;
  switch (m.kind) {
    case ModelKind::Euclidean: return p + v;
    case ModelKind::Hyperboloid: {
      const double ortho = detail::lorentz_dot(v, p);
      if (std::abs(ortho) > 1e-8 * (1.0 + v.norm() * p.norm()))
        throw std::domain_error("exp_map: v not tangent to the hyperboloid at p");
      const double rho = std::sqrt(detail::lorentz_dot(v, v));
      const double k = m.kappa;
      return std::cosh(k * rho) * p + (std::sinh(k * rho) / (k * rho)) * v;
    }
    case ModelKind::HalfSpace:
    case ModelKind::Ball: {
      const SpaceFormModel hyp = SpaceFormModel::hyperboloid(m.ambient_dim, m.kappa);
      const MapJet C = convert_jet(m, hyp, p);
      const AmbientPoint q = exp_map(hyp, C.value, C.J * v);
      return convert(q, hyp, m);
    }
  }
  throw std::logic_error("unreachable");
}

/// Hyperbolic (or Euclidean) distance, by the model's closed form.
inline double distance(const SpaceFormModel& m, const AmbientPoint& p, const AmbientPoint& q) {
  validate_point(m, p);
  validate_point(m, q);
  auto acosh_safe = [](double x) { return std::acosh(std::max(1.0, x)); };
  switch (m.kind) {
    case ModelKind::Euclidean: return (p - q).norm();
    case ModelKind::HalfSpace: {
      const int d = m.ambient_dim;
      const double c = 1.0 + (p - q).squaredNorm() / (2.0 * p(d - 1) * q(d - 1));
      return acosh_safe(c) / m.kappa;
    }
    case ModelKind::Ball: {
      const double c = 1.0 + 2.0 * (p - q).squaredNorm() /
                                ((1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm()));
      return acosh_safe(c) / m.kappa;
    }
    case ModelKind::Hyperboloid: {
      const double c = -m.kappa * m.kappa * detail::lorentz_dot(p, q);
      return acosh_safe(c) / m.kappa;
    }
  }
  throw std::logic_error("unreachable");
}

/// Ideal endpoint of the geodesic ray t -> exp_p(t u), in ball-boundary
/// coordinates (unit vector on S^n). u is expected to have unit model norm;
/// other lengths are accepted, normalized, and flagged via `normalized_input`.
inline BoundaryPoint ideal_endpoint(const SpaceFormModel& m, const AmbientPoint& p, const Vec& u,
                                    bool* normalized_input = nullptr) {
  if (!m.hyperbolic()) throw std::invalid_argument("ideal_endpoint: model must be hyperbolic");
  validate_point(m, p);
  const double norm = metric_norm(m, p, u);
  if (norm == 0.0) throw std::invalid_argument("ideal_endpoint: zero direction");
  if (normalized_input) *normalized_input = std::abs(norm - 1.0) > 1e-8;
  const SpaceFormModel hyp = SpaceFormModel::hyperboloid(m.ambient_dim, m.kappa);
  MapJet C = convert_jet(m, hyp, p);
  const Vec X = C.value;
  const Vec U = (C.J * u) / norm;
  // The ray cosh(kt) X + sinh(kt) U/k escapes along the null direction
  // kappa X + U; its ball-boundary representative is the projectivization.
  Vec W = m.kappa * X + U;
  const int last = static_cast<int>(W.size()) - 1;
  if (W(last) <= 0.0) throw std::runtime_error("ideal_endpoint: degenerate ray");
  Vec b = W.head(last) / W(last);
  return b / b.norm();
}

}  // namespace sphereform
