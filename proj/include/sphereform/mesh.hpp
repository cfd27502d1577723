#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "sphereform/sphere_charts.hpp"

namespace sphereform {

/// Sample-point cloud on S^n with quadrature weights. For n = 2 an icosphere
/// triangulation (weights: one third of the incident spherical-triangle
/// areas); for general n, stereographic-chart grids with partition-of-unity
/// weights. Weights sum to the volume of S^n.
struct SphereMesh {
  int n = 2;
  int level = 0;
  std::vector<Vec> vertices;           // unit vectors in R^{n+1}
  std::vector<ChartPoint> charts;      // chart_of(vertex), cached
  std::vector<double> weights;
  std::vector<std::array<int, 3>> triangles;  // n = 2 only

  std::size_t size() const { return vertices.size(); }

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  static SphereMesh icosphere(int level);
  static SphereMesh chart_grid(int n, int level);
};

namespace detail {

inline double spherical_triangle_area(const Vec& a, const Vec& b, const Vec& c) {
  // Van Oosterom-Strackee: signed solid angle of the triangle (a,b,c).
  Eigen::Matrix3d M;
  M.col(0) = a;
  M.col(1) = b;
  M.col(2) = c;
  const double num = M.determinant();
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

// Smooth (C-infinity) cutoff: 1 on [0, s0], 0 on [s1, inf). Flat contact at
// both ends keeps the midpoint-rule quadrature error superalgebraic.
inline double cutoff(double s, double s0, double s1) {
  if (s <= s0) return 1.0;
  if (s >= s1) return 0.0;
  const double t = (s1 - s) / (s1 - s0);  // 1 at s0, 0 at s1
  auto b = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  return b(t) / (b(t) + b(1.0 - t));
}

}  // namespace detail

inline SphereMesh SphereMesh::icosphere(int level) {
  SphereMesh mesh;
  mesh.n = 2;
  mesh.level = level;

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double raw[12][3] = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& v : raw) {
    Vec p(3);
    p << v[0], v[1], v[2];
    mesh.vertices.push_back(p / p.norm());
  }
  int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& f : faces) {
    Eigen::Matrix3d M;
    M.col(0) = mesh.vertices[f[0]];
    M.col(1) = mesh.vertices[f[1]];
    M.col(2) = mesh.vertices[f[2]];
    if (M.determinant() < 0) std::swap(f[1], f[2]);  // outward orientation
    mesh.triangles.push_back({f[0], f[1], f[2]});
  }

  for (int l = 0; l < level; ++l) {
    std::map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec m = mesh.vertices[a] + mesh.vertices[b];
      m /= m.norm();
      mesh.vertices.push_back(m);
      const int idx = static_cast<int>(mesh.vertices.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }

  mesh.weights.assign(mesh.vertices.size(), 0.0);
  for (const auto& t : mesh.triangles) {
    const double area =
        detail::spherical_triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    for (int k = 0; k < 3; ++k) mesh.weights[t[k]] += area / 3.0;
  }
  mesh.charts.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) mesh.charts.push_back(chart_of(v));
  return mesh;
}

inline SphereMesh SphereMesh::chart_grid(int n, int level) {
  SphereMesh mesh;
  mesh.n = n;
  mesh.level = level;
  const double R = 1.2;           // chart radius; the two charts overlap on 1/R <= |x| <= R
  const int per_axis = 6 * (1 << level);
  const double h = 2.0 * R / per_axis;
  const double s0 = 1.0 / R;      // cutoff starts where the overlap begins

  std::vector<int> idx(n, 0);
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x(i) = -R + h * (idx[i] + 0.5);
      const double r = x.norm();
      if (r < R) {
        const double chi_here = detail::cutoff(r, s0, R);
        const double chi_other = (r > 1e-12) ? detail::cutoff(1.0 / r, s0, R) : 0.0;
        const double pou = chi_here / (chi_here + chi_other);
        if (pou > 0.0) {
          const ChartPoint p(chart, x);
          const double u = 2.0 / (1.0 + r * r);  // round-metric volume element
          mesh.charts.push_back(p);
          mesh.vertices.push_back(sphere_point(p));
          mesh.weights.push_back(pou * std::pow(u, n) * std::pow(h, n));
        }
      }
      int k = 0;
      while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == n) break;
    }
  }
  return mesh;
}

}  // namespace sphereform
