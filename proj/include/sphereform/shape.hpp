#pragma once

#include <limits>
#include <mutex>
#include <optional>

#include "sphereform/immersion.hpp"
#include "sphereform/mesh.hpp"
#include "sphereform/parallel.hpp"

namespace sphereform {

/// Second-order data of an immersion at a point, in the chart basis.
/// S = g^{-1} h; lambdas ascending; direction columns g-orthonormal.
struct ShapeData {
  Mat g;           // induced metric
  Mat h;           // second fundamental form
  Mat S;           // shape operator
  Vec lambdas;     // principal curvatures, ascending
  Mat directions;  // principal directions (chart basis), g-orthonormal
  Vec normal;      // model-unit normal at the sample
};

/// Induced metric, second fundamental form and principal curvatures at p.
/// h_ij = <nu, d2 f_ij + Gamma(df_i, df_j)>; the pencil (h, g) is solved by
/// Cholesky reduction.
inline ShapeData shape_data(const Immersion& f, const Jet2Sample& j) {
  const int n = j.at.n();
  const Mat M = metric_tensor(f.model, j.value);
  ShapeData sd;
  sd.g = j.d1.transpose() * M * j.d1;
  sd.g = 0.5 * (sd.g + sd.g.transpose());
  sd.normal = unit_normal(f, j);

  const bool flat_chart =
      f.model.kind == ModelKind::Euclidean || f.model.kind == ModelKind::Hyperboloid;
  std::optional<Christoffel> gamma;
  if (!flat_chart) gamma = christoffel(f.model, j.value);

  sd.h.resize(n, n);
  const Vec Mnu = M * sd.normal;
  for (int i = 0; i < n; ++i)
    for (int jj = i; jj < n; ++jj) {
      Vec amb(j.value.size());
      for (int a = 0; a < amb.size(); ++a) amb(a) = j.d2[a](i, jj);
      if (gamma) amb += gamma->contract(j.d1.col(i), j.d1.col(jj));
      sd.h(i, jj) = sd.h(jj, i) = Mnu.dot(amb);
    }

  const EigPencil eig = sym_eig_pencil(sd.h, sd.g);
  sd.lambdas = eig.lambdas;
  sd.directions = eig.directions;
  sd.S = sd.g.llt().solve(sd.h);
  return sd;
}

inline ShapeData shape_data(const Immersion& f, const ChartPoint& p) {
  return shape_data(f, jet(f, p));
}

/// Product of the principal curvatures; asserts consistency with det(S).
inline double gaussian_curvature(const ShapeData& sd) {
  double prod = 1.0;
  for (int i = 0; i < sd.lambdas.size(); ++i) prod *= sd.lambdas(i);
  const double det = sd.S.determinant();
  const double scale = std::max(1.0, std::abs(prod));
  if (std::abs(prod - det) > 1e-8 * scale)
    throw std::runtime_error("gaussian_curvature: eigenvalue product disagrees with det(S)");
  return prod;
}

// ---------------------------------------------------------------------------
// Curvature constraint intervals.
// ---------------------------------------------------------------------------

enum class IntervalPosition { Disjoint, Overlaps, Contains, ContainedIn };

inline std::string to_string(IntervalPosition p) {
  switch (p) {
    case IntervalPosition::Disjoint: return "disjoint";
    case IntervalPosition::Overlaps: return "overlaps";
    case IntervalPosition::Contains: return "contains";
    case IntervalPosition::ContainedIn: return "contained-in";
  }
  return "?";
}

/// Constraint interval I with open/closed endpoints (infinite endpoints are
/// open). Classification against [-kappa, kappa] and membership with a
/// 1e-9 tolerance beyond the endpoints; open vs closed endpoints are exact in
/// the classification and share the tolerance in sampled membership.
struct CurvatureInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static constexpr double kMemberTol = 1e-9;

  CurvatureInterval() = default;
  CurvatureInterval(double l, double h, bool lc = false, bool hc = false)
      : lo(l), hi(h), lo_closed(lc), hi_closed(hc) {
    if (!(lo < hi)) throw std::invalid_argument("CurvatureInterval: need lo < hi");
    if (std::isinf(lo)) lo_closed = false;
    if (std::isinf(hi)) hi_closed = false;
  }

  CurvatureInterval negated() const { return CurvatureInterval(-hi, -lo, hi_closed, lo_closed); }

  /// All elements < t (the paper-style "I < t").
  bool entirely_below(double t) const { return hi < t || (hi == t && !hi_closed); }
  /// All elements > t.
  bool entirely_above(double t) const { return lo > t || (lo == t && !lo_closed); }

  bool intersects_band(double kappa) const {
    return !entirely_below(-kappa) && !entirely_above(kappa);
  }

  IntervalPosition classify(double kappa) const {
    if (!intersects_band(kappa)) return IntervalPosition::Disjoint;
    const bool contains_band = (lo < -kappa || (lo == -kappa && lo_closed)) &&
                               (hi > kappa || (hi == kappa && hi_closed));
    if (contains_band) return IntervalPosition::Contains;
    if (lo >= -kappa && hi <= kappa) return IntervalPosition::ContainedIn;
    return IntervalPosition::Overlaps;
  }

  /// Signed distance of x to the nearer endpoint; positive inside.
  double margin(double x) const {
    const double m_lo = std::isinf(lo) ? std::numeric_limits<double>::infinity() : x - lo;
    const double m_hi = std::isinf(hi) ? std::numeric_limits<double>::infinity() : hi - x;
    return std::min(m_lo, m_hi);
  }

  bool contains(double x, double tol = kMemberTol) const { return margin(x) >= -tol; }
};

struct CurvatureRange {
  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = -std::numeric_limits<double>::infinity();
  ChartPoint argmin, argmax;
  bool inside = false;
  double margin = 0.0;  // worst signed distance of a sampled curvature to I
};

/// Extremal sampled principal curvatures over the mesh and the membership
/// verdict for I. Immersion failures are reported with their location.
inline CurvatureRange curvature_range(const Immersion& f, const SphereMesh& mesh,
                                      const CurvatureInterval& I = CurvatureInterval()) {
  std::vector<double> lo(mesh.size()), hi(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) {
    const ShapeData sd = shape_data(f, mesh.charts[v]);
    lo[v] = sd.lambdas(0);
    hi[v] = sd.lambdas(sd.lambdas.size() - 1);
  });
  // sequential reduction keeps the arg locations reproducible across runs
  CurvatureRange out;
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    if (lo[v] < out.lambda_min) {
      out.lambda_min = lo[v];
      out.argmin = mesh.charts[v];
    }
    if (hi[v] > out.lambda_max) {
      out.lambda_max = hi[v];
      out.argmax = mesh.charts[v];
    }
  }
  out.margin = std::min(I.margin(out.lambda_min), I.margin(out.lambda_max));
  out.inside = out.margin >= -CurvatureInterval::kMemberTol;
  return out;
}

/// f o g together with the curvature prediction deg(g) * (lambda o g).
struct ComposedImmersion {
  Immersion immersion;
  int degree_factor;  // deg(g)
};

inline ComposedImmersion compose_with_diffeo(const Immersion& f, const SphereDiffeo& g) {
  return ComposedImmersion{precompose(f, g), g.degree};
}

/// Sorted predicted spectrum of f o g at p: deg(g) * lambdas of f at g(p).
inline Vec predicted_composed_spectrum(const Immersion& f, const SphereDiffeo& g,
                                       const ChartPoint& p) {
  const ShapeData sd = shape_data(f, g.map(p));
  Vec pred = g.degree * sd.lambdas;
  std::sort(pred.data(), pred.data() + pred.size());
  return pred;
}

}  // namespace sphereform
