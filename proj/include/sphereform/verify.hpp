#pragma once

#include <chrono>
#include <random>

#include "sphereform/catalog.hpp"

namespace sphereform {
namespace verify {

struct CheckResult {
  std::string id;
  std::string label;
  bool pass = false;
  double margin = 0.0;  // worst headroom against the check's tolerance
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string details;
};

struct Options {
  unsigned seed = 20240817u;
  int mesh_level = 4;
};

namespace detail {

inline ChartPoint random_chart_point(std::mt19937& rng, int n = 2, double radius = 0.95) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, radius);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  v *= unif(rng) / v.norm();
  return ChartPoint(rng() % 2 ? ChartId::North : ChartId::South, v);
}

// Levi-Civita symbols by 4th-order differences of the metric (relative step
// 1e-4): the metric-route cross-check for the closed-form symbols.
inline Christoffel christoffel_from_metric(const SpaceFormModel& m, const AmbientPoint& p) {
  const int d = m.coord_dim();
  const double h = 1e-4 * std::max(1.0, p.norm());
  std::vector<Mat> dg(d);
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e(k) = 1.0;
    dg[k] = (-metric_tensor(m, p + 2 * h * e) + 8.0 * metric_tensor(m, p + h * e) -
             8.0 * metric_tensor(m, p - h * e) + metric_tensor(m, p - 2 * h * e)) /
            (12.0 * h);
  }
  const Mat ginv = metric_tensor(m, p).inverse();
  Christoffel out;
  out.symbols.assign(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out.symbols[k](i, j) = 0.5 * s;
      }
  return out;
}

inline AmbientPoint random_halfspace_point(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> xy(-1.5, 1.5), height(0.3, 3.0);
  Vec p(dim);
  for (int i = 0; i < dim - 1; ++i) p(i) = xy(rng);
  p(dim - 1) = height(rng);
  return p;
}

inline AmbientPoint random_ball_point(std::mt19937& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rad(0.05, 0.8);
  Vec p(dim);
  for (int i = 0; i < dim; ++i) p(i) = gauss(rng);
  return p * (rad(rng) / p.norm());
}

template <typename Fn>
inline CheckResult timed(const std::string& id, const std::string& label, double budget, Fn&& fn) {
  CheckResult r;
  r.id = id;
  r.label = label;
  r.budget_seconds = budget;
  const auto begin = std::chrono::steady_clock::now();
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.details += std::string(r.details.empty() ? "" : "; ") + "exception: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  if (r.seconds >= budget) {
    r.pass = false;
    r.details += std::string(r.details.empty() ? "" : "; ") + "runtime budget exceeded";
  }
  return r;
}

}  // namespace detail

/// 1. Half-space Christoffel symbols: the closed-form pattern -1/q^{n+1}
/// exactly, and the metric-derived route to 1e-6 at 100 random points.
inline CheckResult check_christoffel_fidelity(const Options& opt) {
  return detail::timed("C1", "christoffel fidelity (closed form + metric route)", 1.0,
                       [&](CheckResult& r) {
    std::mt19937 rng(opt.seed);
    double worst_exact = 0.0;
    for (double kappa : {1.0, 2.0}) {
      const SpaceFormModel m = SpaceFormModel::half_space(3, kappa);
      for (double q : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        Vec p(3);
        p << 0.7, -0.4, q;
        const Christoffel G = christoffel(m, p);
        const double want = -1.0 / q;
        for (int rr = 0; rr < 2; ++rr) {
          worst_exact = std::max(worst_exact, std::abs(G[rr](rr, 2) - want));
          worst_exact = std::max(worst_exact, std::abs(G[rr](2, rr) - want));
          worst_exact = std::max(worst_exact, std::abs(G[2](rr, rr) + want));
        }
        worst_exact = std::max(worst_exact, std::abs(G[2](2, 2) - want));
      }
    }
    double worst_fd = 0.0;
    const SpaceFormModel half = SpaceFormModel::half_space(3, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const AmbientPoint p = detail::random_halfspace_point(rng, 3);
      const Christoffel exact = christoffel(half, p);
      const Christoffel fd = detail::christoffel_from_metric(half, p);
      for (int k = 0; k < 3; ++k)
        worst_fd = std::max(worst_fd, (exact[k] - fd[k]).cwiseAbs().maxCoeff());
    }
    r.pass = (worst_exact == 0.0) && (worst_fd < 1e-6);
    r.margin = 1e-6 - worst_fd;
    r.details = "closed-form deviation " + std::to_string(worst_exact) + ", metric-route max err " +
                std::to_string(worst_fd);
  });
}

/// 2. Round spheres in all three models carry curvature mu to 1e-7 at mesh
/// level 4 (plus a non-unit-kappa pair).
inline CheckResult check_round_sphere_curvatures(const Options& opt) {
  return detail::timed("C2", "round-sphere curvatures equal mu", 5.0, [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    struct Case {
      const char* name;
      std::map<std::string, double> params;
      double mu;
    };
    double worst = 0.0;
    for (const Case& cs : {Case{"scaled_sphere", {{"mu", -2.0}}, -2.0},
                           Case{"halfspace_sphere", {{"mu", -2.0}, {"kappa", 1.0}}, -2.0},
                           Case{"ball_sphere", {{"mu", -2.0}, {"kappa", 1.0}}, -2.0},
                           Case{"halfspace_sphere", {{"mu", -1.5}, {"kappa", 0.5}}, -1.5},
                           Case{"ball_sphere", {{"mu", -1.5}, {"kappa", 0.5}}, -1.5}}) {
      const Immersion f = catalog::make(cs.name, cs.params);
      const CurvatureRange range = curvature_range(f, mesh);
      worst = std::max({worst, std::abs(range.lambda_min - cs.mu), std::abs(range.lambda_max - cs.mu)});
    }
    r.pass = worst < 1e-7;
    r.margin = 1e-7 - worst;
    r.details = "max |lambda - mu| = " + std::to_string(worst);
  });
}

/// 3. Flat-Gauss derivative identity residual below 1e-5 over 100 random
/// principal pairs on the round and bumpy half-space spheres.
inline CheckResult check_flat_gauss_derivative(const Options& opt) {
  return detail::timed("C3", "flat-Gauss derivative identity", 5.0, [&](CheckResult& r) {
    std::mt19937 rng(opt.seed + 1);
    double worst = 0.0;
    for (const char* name : {"halfspace_sphere", "bumpy_halfspace_sphere"}) {
      const Immersion f = catalog::make(name, {{"mu", -2.0}, {"kappa", 1.0}});
      for (int trial = 0; trial < 50; ++trial) {
        const ChartPoint p = detail::random_chart_point(rng);
        const ShapeData sd = shape_data(f, p);
        for (int k = 0; k < 2; ++k)
          worst = std::max(worst, flat_gauss_derivative_residual(f, p, sd.directions.col(k),
                                                                 sd.lambdas(k)));
      }
    }
    r.pass = worst < 1e-5;
    r.margin = 1e-5 - worst;
    r.details = "max residual " + std::to_string(worst) + " over 200 pairs";
  });
}

/// 4. Normal-flow curvature law: shape data of the flowed immersion matches
/// the closed form to 1e-6 on lambda < kappa entries, with the three
/// closed-form branches checked against it.
inline CheckResult check_normal_flow_law(const Options& opt) {
  return detail::timed("C4", "normal-flow curvature law", 10.0, [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(3);
    const std::vector<double> r_grid{0.1, 0.5, 1.0, 2.0, 4.0};
    double worst_branch = 0.0;
    for (double rr : r_grid) {
      for (double ell : {0.25, 0.6, 1.5}) {
        worst_branch = std::max(worst_branch,
                                std::abs(curvature_flow_value(-1.0 / std::tanh(ell), rr, 1.0) -
                                         (-1.0 / std::tanh(ell + rr))));
        worst_branch = std::max(worst_branch, std::abs(curvature_flow_value(std::tanh(ell), rr, 1.0) -
                                                       std::tanh(ell - rr)));
      }
      worst_branch = std::max(worst_branch, std::abs(curvature_flow_value(-1.0, rr, 1.0) + 1.0));
    }
    double worst = 0.0;
    for (const char* name : {"halfspace_sphere", "bumpy_ball_sphere"}) {
      const Immersion f = catalog::make(name);
      std::vector<Vec> base(mesh.size());
      parallel_for(mesh.size(), [&](std::size_t v) {
        base[v] = shape_data(f, mesh.charts[v]).lambdas;
      });
      for (double rr : r_grid) {
        const Immersion flowed = normal_flow(f, rr);
        std::mutex mtx;
        parallel_for(mesh.size(), [&](std::size_t v) {
          const ShapeData sd = shape_data(flowed, mesh.charts[v]);
          double local = 0.0;
          for (int k = 0; k < 2; ++k)
            local = std::max(local,
                             std::abs(sd.lambdas(k) - curvature_flow_value(base[v](k), rr, 1.0)));
          std::lock_guard<std::mutex> lock(mtx);
          worst = std::max(worst, local);
        });
      }
    }
    r.pass = worst < 1e-6 && worst_branch < 1e-12;
    r.margin = 1e-6 - worst;
    r.details = "max |shape - closed form| = " + std::to_string(worst) + ", branch identities " +
                std::to_string(worst_branch);
  });
}

/// 5. Visual-Gauss invariance along the normal flow: angular drift of nu_hat
/// below 1e-6 over the r grid.
inline CheckResult check_visual_invariance(const Options& opt) {
  return detail::timed("C5", "visual-Gauss invariance along the flow", 10.0, [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    double worst = 0.0;
    for (const char* name : {"ball_sphere", "bumpy_ball_sphere"}) {
      const Immersion f = catalog::make(name);
      std::vector<Vec> base(mesh.size());
      parallel_for(mesh.size(), [&](std::size_t v) { base[v] = visual_gauss(f, mesh.charts[v]); });
      for (double rr : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const Immersion flowed = normal_flow(f, rr);
        std::mutex mtx;
        parallel_for(mesh.size(), [&](std::size_t v) {
          const double drift = angle_between(visual_gauss(flowed, mesh.charts[v]), base[v]);
          std::lock_guard<std::mutex> lock(mtx);
          worst = std::max(worst, drift);
        });
      }
    }
    r.pass = worst < 1e-6;
    r.margin = 1e-6 - worst;
    r.details = "max angular drift " + std::to_string(worst);
  });
}

/// 6. Retraction containment and spectra: both retractions keep immersions
/// inside I with the paper's interpolation formulas to 1e-5 and Gauss drift
/// below 1e-6, 33 steps at the verification mesh level.
inline CheckResult check_retractions(const Options& opt) {
  return detail::timed("C6", "retraction containment and interpolation spectra", 30.0,
                       [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    const int steps = 33;
    bool pass = true;
    double worst_formula = 0.0, worst_drift = 0.0, worst_margin = 1e9;
    std::string notes;

    struct Scenario {
      const char* name;
      double mu;
      CurvatureInterval I;
      bool halfspace;
    };
    for (const Scenario& sc :
         {Scenario{"bumpy_halfspace_sphere", -2.0, CurvatureInterval(-3.0, -1.2), true},
          Scenario{"ellipsoid", -1.0, CurvatureInterval(-2.5, -0.2), false}}) {
      const Immersion f = catalog::make(sc.name);
      const DeformationPath path = sc.halfspace ? halfspace_retraction_path(f, sc.mu, sc.I)
                                                : euclidean_retraction_path(f, sc.mu, sc.I);
      const HomotopyReport report = track(path, mesh, steps, sc.I, 1e-6);
      pass = pass && report.pass;
      worst_drift = std::max(worst_drift, report.max_drift);
      worst_margin = std::min(worst_margin, report.worst_margin);
      if (!report.pass) notes += std::string(sc.name) + ": " + report.failure_reason() + "; ";

      // spectra against the interpolation formulas, on a subsampled grid
      std::vector<ShapeData> base(mesh.size());
      parallel_for(mesh.size(), [&](std::size_t v) { base[v] = shape_data(f, mesh.charts[v]); });
      for (double s : {0.25, 0.5, 0.75, 1.0}) {
        const Immersion fs = path.at(s);
        std::mutex mtx;
        parallel_for(mesh.size(), [&](std::size_t v) {
          const ShapeData after = shape_data(fs, mesh.charts[v]);
          Vec predicted(2);
          for (int k = 0; k < 2; ++k) {
            const double lam = base[v].lambdas(k);
            predicted(k) =
                sc.halfspace
                    ? halfspace_retraction_lambda(
                          lam, sc.mu, s, halfspace_retraction_rho(f, mesh.charts[v], lam, sc.mu))
                    : euclidean_retraction_lambda(lam, sc.mu, s);
          }
          std::sort(predicted.data(), predicted.data() + 2);
          double local = 0.0;
          for (int k = 0; k < 2; ++k) local = std::max(local, std::abs(after.lambdas(k) - predicted(k)));
          std::lock_guard<std::mutex> lock(mtx);
          worst_formula = std::max(worst_formula, local);
        });
      }
    }
    pass = pass && worst_formula < 1e-5 && worst_drift <= 1e-6;
    r.pass = pass;
    r.margin = std::min(1e-5 - worst_formula, worst_margin);
    r.details = "formula err " + std::to_string(worst_formula) + ", drift " +
                std::to_string(worst_drift) + ", interval margin " + std::to_string(worst_margin) +
                (notes.empty() ? "" : ("; " + notes));
  });
}

/// 7. Degree table at n = 2: the three sphere examples and the bumpy sphere
/// all have Gauss-map degree 1, with residual < 0.1 and stability over mesh
/// levels 3-5.
inline CheckResult check_degree_table(const Options&) {
  return detail::timed("C7", "Gauss-map degree table", 20.0, [&](CheckResult& r) {
    double worst_residual = 0.0;
    bool pass = true;
    std::string rows;
    for (const char* name : {"inclusion", "reflected", "minus_inclusion", "bumpy_sphere"}) {
      const Immersion f = catalog::make(name);
      int first = 0;
      for (int level : {3, 4, 5}) {
        const DegreeResult deg = degree(gauss_sphere_map(f), SphereMesh::icosphere(level));
        worst_residual = std::max(worst_residual, deg.residual);
        if (level == 3) first = deg.rounded;
        pass = pass && deg.rounded == 1 && deg.rounded == first && deg.residual < 0.1;
      }
      rows += std::string(name) + "=1 ";
    }
    r.pass = pass;
    r.margin = 0.1 - worst_residual;
    r.details = rows + "max residual " + std::to_string(worst_residual);
  });
}

/// 8. Sign predictions: positive Jacobian fields for nu_bar (I < -kappa) and
/// nu (I < 0); composition with the reflection flips the curvature side and
/// keeps the predicted orientation class at n = 2.
inline CheckResult check_sign_predictions(const Options& opt) {
  return detail::timed("C8", "pointwise Jacobian signs and reflection", 10.0, [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    bool pass = true;
    double min_det = 1e9;
    for (const char* name : {"halfspace_sphere", "bumpy_halfspace_sphere"}) {
      const auto jf = jacobian_field(flat_gauss_sphere_map(catalog::make(name)), mesh, FrameKind::Round);
      pass = pass && jf.sign == 1;
      min_det = std::min(min_det, jf.min_abs_det);
    }
    for (const char* name : {"inclusion", "ellipsoid", "bumpy_sphere"}) {
      const auto jf = jacobian_field(gauss_sphere_map(catalog::make(name)), mesh, FrameKind::Round);
      pass = pass && jf.sign == 1;
      min_det = std::min(min_det, jf.min_abs_det);
    }
    // reflection flips the curvature side and preserves the n = 2 class
    {
      const Immersion f = catalog::make("bumpy_halfspace_sphere");
      const CurvatureInterval I(-2.2, -1.8);
      const auto [flipped, J] = switch_side(f, I);
      const CurvatureRange range = curvature_range(flipped, mesh, J);
      pass = pass && range.inside && range.lambda_min > 1.0;
      pass = pass && orientation_class(flipped, J, mesh) == OrientationClass::Preserving;
      pass = pass && orientation_class(f, I, mesh) == OrientationClass::Preserving;
    }
    {
      const Immersion f = catalog::make("ellipsoid");
      const CurvatureInterval I(-2.5, -0.2);
      const auto [flipped, J] = switch_side(f, I);
      pass = pass && orientation_class(flipped, J, mesh) == OrientationClass::Preserving;
    }
    r.pass = pass;
    r.margin = min_det;
    r.details = "min |det J| over certified maps " + std::to_string(min_det);
  });
}

/// 9. Overlap-path feasibility: the tau search succeeds within 20 steps and
/// the tracked path stays inside I = (-2, 1).
inline CheckResult check_overlap_path(const Options& opt) {
  return detail::timed("C9", "overlap path with adaptive tau", 60.0, [&](CheckResult& r) {
    const Immersion f = catalog::make("bumpy_ball_sphere");
    const CurvatureInterval I(-2.0, 1.0);
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    const auto result = find_overlap_tau(f, -1.5, I, mesh, 33, 20);
    r.pass = result.found && result.report.pass;
    r.margin = result.found ? result.report.worst_margin : -1.0;
    r.details = result.found
                    ? ("tau = " + std::to_string(result.tau) + " at k = " + std::to_string(result.k) +
                       ", steps " + std::to_string(result.report.steps.size()) + ", margin " +
                       std::to_string(result.report.worst_margin))
                    : "no tau found within 20 search steps";
  });
}

/// 10. Single-signed curvature for |lambda| > kappa entries, with the
/// overlap-regime entry as the deliberately mixed negative control.
inline CheckResult check_single_signedness(const Options& opt) {
  return detail::timed("C10", "single-signed curvature outside the band", 5.0,
                       [&](CheckResult& r) {
    const SphereMesh mesh = SphereMesh::icosphere(opt.mesh_level);
    bool pass = true;
    std::string rows;
    int checked = 0;
    for (const auto& entry : catalog::standard_entries()) {
      if (!entry.model.hyperbolic()) continue;
      const CurvatureRange range = curvature_range(catalog::make(entry), mesh);
      const double kappa = entry.model.kappa;
      const bool single_signed = range.lambda_max < -kappa || range.lambda_min > kappa;
      if (entry.name == "bumpy_ball_sphere") {
        // negative control: must FAIL the disjoint-regime check
        pass = pass && !single_signed && range.lambda_min < -kappa && range.lambda_max > -kappa;
        rows += entry.name + "=mixed(detected) ";
      } else {
        ++checked;
        pass = pass && single_signed;
        rows += entry.name + (range.lambda_max < -kappa ? "=below " : "=above ");
      }
    }
    pass = pass && checked >= 3;
    r.pass = pass;
    r.margin = pass ? 1.0 : -1.0;
    r.details = rows;
  });
}

inline std::vector<CheckResult> run_all(const Options& opt = {}) {
  return {check_christoffel_fidelity(opt), check_round_sphere_curvatures(opt),
          check_flat_gauss_derivative(opt), check_normal_flow_law(opt),
          check_visual_invariance(opt),     check_retractions(opt),
          check_degree_table(opt),          check_sign_predictions(opt),
          check_overlap_path(opt),          check_single_signedness(opt)};
}

}  // namespace verify
}  // namespace sphereform
