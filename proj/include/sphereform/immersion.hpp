#pragma once

#include <functional>
#include <utility>

#include "sphereform/spaceform.hpp"
#include "sphereform/sphere_charts.hpp"

namespace sphereform {

/// Value plus first and second partials of an immersion at a chart point.
/// d2[a](i,j) is the second partial of ambient component a; symmetric in
/// (i, j).
struct Jet2Sample {
  ChartPoint at;
  Vec value;
  Mat d1;               // coord_dim x n
  std::vector<Mat> d2;  // coord_dim entries of n x n
};

struct NotImmersionError : std::runtime_error {
  ChartPoint where;
  double sigma_min;
  NotImmersionError(ChartPoint p, double s)
      : std::runtime_error("not an immersion at chart " + to_string(p.chart) +
                           " (smallest singular value " + std::to_string(s) + ")"),
        where(std::move(p)),
        sigma_min(s) {}
};

/// An evaluable map S^n -> M. `eval` must be total on both charts; exact
/// chart jets are optional, finite differences of eval fill in otherwise.
struct Immersion {
  SpaceFormModel model;
  std::function<Vec(const ChartPoint&)> eval;
  std::function<Jet2Sample(const ChartPoint&)> exact_jet;  // may be empty
  double fd_step = 1e-3;  // relative step for fallback jets

  bool has_exact_jet() const { return static_cast<bool>(exact_jet); }
};

namespace detail {

// 4th-order central differences, with mixed partials by nested first-
// derivative stencils.
inline Jet2Sample fd_jet(const Immersion& f, const ChartPoint& p, double step) {
  const int n = p.n();
  const double h = step * std::max(1.0, p.x.norm());
  auto at = [&](const Vec& x) -> Vec { return f.eval(ChartPoint(p.chart, x)); };
  auto d1_at = [&](const Vec& x, int i) -> Vec {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    return (-at(x + 2 * h * e) + 8 * at(x + h * e) - 8 * at(x - h * e) + at(x - 2 * h * e)) /
           (12 * h);
  };
  Jet2Sample jet;
  jet.at = p;
  jet.value = at(p.x);
  const int m = static_cast<int>(jet.value.size());
  jet.d1.resize(m, n);
  for (int i = 0; i < n; ++i) jet.d1.col(i) = d1_at(p.x, i);
  jet.d2.assign(m, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    Vec ei = Vec::Zero(n);
    ei(i) = 1.0;
    // diagonal: 4th-order second-derivative stencil
    Vec dii = (-at(p.x + 2 * h * ei) + 16 * at(p.x + h * ei) - 30 * jet.value +
               16 * at(p.x - h * ei) - at(p.x - 2 * h * ei)) /
              (12 * h * h);
    for (int a = 0; a < m; ++a) jet.d2[a](i, i) = dii(a);
    for (int j = i + 1; j < n; ++j) {
      Vec dij = (-d1_at(p.x + 2 * h * ei, j) + 8 * d1_at(p.x + h * ei, j) -
                 8 * d1_at(p.x - h * ei, j) + d1_at(p.x - 2 * h * ei, j)) /
                (12 * h);
      for (int a = 0; a < m; ++a) jet.d2[a](i, j) = jet.d2[a](j, i) = dij(a);
    }
  }
  return jet;
}

}  // namespace detail

/// 2-jet of f at p: the exact jet when available, 4th-order central
/// differences of eval otherwise. Throws NotImmersionError when d1 is rank
/// deficient.
inline Jet2Sample jet(const Immersion& f, const ChartPoint& p, double step = 0.0) {
  Jet2Sample j = f.has_exact_jet() ? f.exact_jet(p)
                                   : detail::fd_jet(f, p, step > 0.0 ? step : f.fd_step);
  Eigen::JacobiSVD<Mat> svd(j.d1);
  const double smin = svd.singularValues().tail(1)(0);
  const double smax = svd.singularValues()(0);
  if (!(smin > 1e-10 * std::max(1.0, smax))) throw NotImmersionError(p, smin);
  return j;
}

/// Unit normal of f at the jet's basepoint: model-unit length, oriented so
/// that (df(u_1),...,df(u_n), nu) is positively oriented for a positively
/// oriented frame (u_i) of S^n.
inline Vec unit_normal(const Immersion& f, const Jet2Sample& j) {
  const double orient = chart_orientation(j.at.chart);
  if (f.model.kind == ModelKind::Hyperboloid) {
    const int d = f.model.coord_dim();
    Mat A(d, d - 1);
    A.leftCols(d - 2) = j.d1;
    A.col(d - 2) = f.model.kappa * j.value;
    Vec w = detail::lorentz_form(d) * generalized_cross(A);
    const double q = detail::lorentz_dot(w, w);
    if (!(q > 0.0)) throw std::runtime_error("unit_normal: degenerate tangent frame");
    w /= std::sqrt(q);
    // Frame (t_1..t_n, w) of T Hyp is positive iff det[t_1..t_n, w, X] > 0.
    Mat F(d, d);
    F.leftCols(d - 2) = j.d1;
    F.col(d - 2) = w;
    F.col(d - 1) = j.value;
    if (orient * F.determinant() < 0.0) w = -w;
    return w;
  }
  Vec w = generalized_cross(j.d1);  // det[d1 | w] = |w|^2 > 0
  const double norm = w.norm();
  if (!(norm > 0.0)) throw std::runtime_error("unit_normal: degenerate tangent frame");
  return (orient / (norm * conformal_factor(f.model, j.value))) * w;
}

/// Euclidean-unit normal direction in the conformal models (for the
/// half-space model this is the flat Gauss map value).
inline Vec euclidean_unit_normal(const Immersion& f, const Jet2Sample& j) {
  if (f.model.kind == ModelKind::Hyperboloid)
    throw std::invalid_argument("euclidean_unit_normal: not defined in the hyperboloid chart");
  Vec w = generalized_cross(j.d1);
  return (chart_orientation(j.at.chart) / w.norm()) * w;
}

/// The same immersion expressed in another model of equal curvature, with
/// exact jets when f has them.
inline Immersion convert_immersion(const Immersion& f, const SpaceFormModel& to) {
  if (f.model == to) return f;
  Immersion out;
  out.model = to;
  out.fd_step = f.fd_step;
  const SpaceFormModel from = f.model;
  out.eval = [f, from, to](const ChartPoint& p) { return convert(f.eval(p), from, to); };
  if (f.has_exact_jet()) {
    out.exact_jet = [f, from, to](const ChartPoint& p) {
      Jet2Sample j = f.exact_jet(p);
      MapJet C = convert_jet(from, to, j.value);
      Jet2Sample r;
      r.at = p;
      r.value = C.value;
      r.d1 = C.J * j.d1;
      const int m = static_cast<int>(C.value.size());
      const int n = p.n();
      r.d2.assign(m, Mat::Zero(n, n));
      for (int a = 0; a < m; ++a) {
        r.d2[a] = j.d1.transpose() * C.H[a] * j.d1;
        for (int b = 0; b < static_cast<int>(j.value.size()); ++b)
          r.d2[a] += C.J(a, b) * j.d2[b];
      }
      return r;
    };
  }
  return out;
}

/// f composed with a sphere diffeomorphism (evaluation f o g, jets by the
/// chain rule when both are exact).
inline Immersion precompose(const Immersion& f, const SphereDiffeo& g) {
  Immersion out;
  out.model = f.model;
  out.fd_step = f.fd_step;
  out.eval = [f, g](const ChartPoint& p) { return f.eval(g.map(p)); };
  if (f.has_exact_jet()) {
    out.exact_jet = [f, g](const ChartPoint& p) {
      const MapJet gj = g.jet(p);
      const ChartPoint q = g.map(p);
      Jet2Sample j = f.exact_jet(q);
      Jet2Sample r;
      r.at = p;
      r.value = j.value;
      r.d1 = j.d1 * gj.J;
      const int m = static_cast<int>(j.value.size());
      const int n = p.n();
      r.d2.assign(m, Mat::Zero(n, n));
      for (int a = 0; a < m; ++a) {
        r.d2[a] = gj.J.transpose() * j.d2[a] * gj.J;
        for (int k = 0; k < n; ++k) r.d2[a] += j.d1(a, k) * gj.H[k];
      }
      return r;
    };
  }
  return out;
}

}  // namespace sphereform
