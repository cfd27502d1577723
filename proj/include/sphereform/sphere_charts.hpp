#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "sphereform/linalg.hpp"

namespace sphereform {

enum class ChartId { North, South };

inline std::string to_string(ChartId c) { return c == ChartId::North ? "north" : "south"; }

/// Point of S^n in a stereographic chart. The North chart projects from
/// +e_{n+1} (and covers everything but that pole), the South chart from
/// -e_{n+1}. Transition on the overlap: x -> x/|x|^2.
struct ChartPoint {
  ChartId chart = ChartId::North;
  Vec x;  // length n

  ChartPoint() = default;
  ChartPoint(ChartId c, Vec coords) : chart(c), x(std::move(coords)) {}
  int n() const { return static_cast<int>(x.size()); }
};

/// Orientation of the chart coordinate frame relative to the sphere
/// orientation ((u_1,...,u_n,p) positively oriented in R^{n+1}).
/// The South chart frame is positive, the North chart frame negative,
/// everywhere and for every n.
inline double chart_orientation(ChartId c) { return c == ChartId::South ? 1.0 : -1.0; }

inline ChartPoint chart_transition(const ChartPoint& p) {
  const double r2 = p.x.squaredNorm();
  if (r2 == 0.0) throw std::domain_error("chart_transition: pole is not in the overlap");
  return ChartPoint(p.chart == ChartId::North ? ChartId::South : ChartId::North, p.x / r2);
}

/// Embedding S^n -> R^{n+1} of a chart point, with exact first and second
/// derivatives: S(x) = (u x, s (1-u)), u = 2/(1+|x|^2), s = +1 (North), -1
/// (South).
inline MapJet sphere_param_jet(const ChartPoint& p) {
  const int n = p.n();
  const double s = (p.chart == ChartId::North) ? 1.0 : -1.0;
  const double u = 2.0 / (1.0 + p.x.squaredNorm());
  const double u2 = u * u, u3 = u2 * u;
  MapJet out;
  out.value.resize(n + 1);
  out.value.head(n) = u * p.x;
  out.value(n) = s * (1.0 - u);
  out.J.resize(n + 1, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      out.J(a, i) = u * (a == i ? 1.0 : 0.0) - u2 * p.x(i) * p.x(a);
  for (int i = 0; i < n; ++i) out.J(n, i) = s * u2 * p.x(i);
  out.H.assign(n + 1, Mat::Zero(n, n));
  for (int a = 0; a < n; ++a) {
    Mat& Ha = out.H[a];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double t = 0.0;
        if (a == i) t += p.x(j);
        if (a == j) t += p.x(i);
        if (i == j) t += p.x(a);
        Ha(i, j) = -u2 * t + 2.0 * u3 * p.x(a) * p.x(i) * p.x(j);
      }
  }
  Mat& Hn = out.H[n];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Hn(i, j) = s * (u2 * (i == j ? 1.0 : 0.0) - 2.0 * u3 * p.x(i) * p.x(j));
  return out;
}

inline Vec sphere_point(const ChartPoint& p) {
  const double u = 2.0 / (1.0 + p.x.squaredNorm());
  Vec v(p.n() + 1);
  v.head(p.n()) = u * p.x;
  v(p.n()) = (p.chart == ChartId::North ? 1.0 : -1.0) * (1.0 - u);
  return v;
}

/// Chart coordinates of a unit vector, in the chart whose coordinates satisfy
/// |x| <= 1 (the hemisphere away from the projection pole).
inline ChartPoint chart_of(const Vec& unit_point) {
  const int n = static_cast<int>(unit_point.size()) - 1;
  const double last = unit_point(n);
  if (last <= 0.0) return ChartPoint(ChartId::North, unit_point.head(n) / (1.0 - last));
  return ChartPoint(ChartId::South, unit_point.head(n) / (1.0 + last));
}

inline ChartPoint to_chart(const Vec& unit_point, ChartId chart) {
  const int n = static_cast<int>(unit_point.size()) - 1;
  const double last = unit_point(n);
  const double denom = (chart == ChartId::North) ? (1.0 - last) : (1.0 + last);
  if (denom <= 1e-14) throw std::domain_error("to_chart: point at the projection pole");
  return ChartPoint(chart, unit_point.head(n) / denom);
}

// ---------------------------------------------------------------------------
// Sphere self-maps given in charts, with exact chart jets.
// ---------------------------------------------------------------------------

/// Diffeomorphism of S^n given chart-to-chart; jets of the coordinate
/// representation x -> x' between the charts chosen by map().
struct SphereDiffeo {
  std::string name;
  int degree = 1;
  std::function<ChartPoint(const ChartPoint&)> map;
  // Chart-coordinate jet of the representation at p (same charts as map(p)).
  std::function<MapJet(const ChartPoint&)> jet;

  static SphereDiffeo identity(int n) {
    SphereDiffeo g;
    g.name = "identity";
    g.degree = 1;
    g.map = [](const ChartPoint& p) { return p; };
    g.jet = [n](const ChartPoint& p) {
      return MapJet::affine(Mat::Identity(n, n), Vec::Zero(n), p.x);
    };
    return g;
  }

  /// Reflection in the hyperplane x_1 = 0 of R^{n+1}; chart-preserving.
  static SphereDiffeo reflection(int n) {
    SphereDiffeo g;
    g.name = "reflection";
    g.degree = -1;
    Mat R = Mat::Identity(n, n);
    R(0, 0) = -1.0;
    g.map = [R](const ChartPoint& p) { return ChartPoint(p.chart, R * p.x); };
    g.jet = [R, n](const ChartPoint& p) { return MapJet::affine(R, Vec::Zero(n), p.x); };
    return g;
  }

  /// p -> -p; swaps charts: (N, x) -> (S, -x).
  static SphereDiffeo antipodal(int n) {
    SphereDiffeo g;
    g.name = "antipodal";
    g.degree = (n % 2 == 0) ? -1 : 1;  // deg = (-1)^{n+1}
    g.map = [](const ChartPoint& p) {
      return ChartPoint(p.chart == ChartId::North ? ChartId::South : ChartId::North, -p.x);
    };
    g.jet = [n](const ChartPoint& p) {
      return MapJet::affine(-Mat::Identity(n, n), Vec::Zero(n), p.x);
    };
    return g;
  }
};

}  // namespace sphereform
