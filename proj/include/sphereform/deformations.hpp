#pragma once

#include <cmath>

#include "sphereform/gauss_maps.hpp"

namespace sphereform {

// ---------------------------------------------------------------------------
// Round spheres with prescribed principal curvature mu.
// ---------------------------------------------------------------------------

namespace detail {

inline Immersion affine_sphere_immersion(const SpaceFormModel& model, const Mat& A, const Vec& b) {
  Immersion f;
  f.model = model;
  f.eval = [A, b](const ChartPoint& p) -> Vec { return A * sphere_point(p) + b; };
  f.exact_jet = [A, b](const ChartPoint& p) {
    const MapJet S = sphere_param_jet(p);
    Jet2Sample j;
    j.at = p;
    j.value = A * S.value + b;
    j.d1 = A * S.J;
    const int m = static_cast<int>(j.value.size());
    j.d2.assign(m, Mat::Zero(p.n(), p.n()));
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < static_cast<int>(S.value.size()); ++c)
        if (A(a, c) != 0.0) j.d2[a] += A(a, c) * S.H[c];
    return j;
  };
  return f;
}

}  // namespace detail

/// Euclidean ball-model radius of the hyperbolic sphere with principal
/// curvatures mu < -kappa (outward normal): t = c - sqrt(c^2 - 1) with
/// c = -mu/kappa, i.e. tanh of half the hyperbolic radius
/// (1/kappa) arccoth(-mu/kappa).
inline double ball_sphere_coordinate_radius(double mu, double kappa) {
  const double c = -mu / kappa;
  if (!(c > 1.0)) throw std::invalid_argument("ball sphere: need mu < -kappa");
  return c - std::sqrt(c * c - 1.0);
}

/// The round sphere immersion with all principal curvatures equal to mu.
///   Euclidean: (-1/mu) iota for mu < 0, (1/mu) iota o rho for mu > 0.
///   HalfSpace: p -> (1/kappa)(c_t + r_t p), r_t = -1/(mu/kappa + 1),
///              c_t = (mu/kappa)/(mu/kappa + 1) e_{n+1}; requires mu < -kappa.
///   Ball:      p -> t p with t = ball_sphere_coordinate_radius(mu, kappa).
inline Immersion round_sphere(const SpaceFormModel& model, double mu) {
  const int m = model.ambient_dim;
  switch (model.kind) {
    case ModelKind::Euclidean: {
      if (mu == 0.0) throw std::invalid_argument("round_sphere: mu = 0 has no Euclidean sphere");
      if (mu < 0.0)
        return detail::affine_sphere_immersion(model, (-1.0 / mu) * Mat::Identity(m, m), Vec::Zero(m));
      Mat A = (1.0 / mu) * Mat::Identity(m, m);
      A(0, 0) = -A(0, 0);  // composed with the reflection rho
      return detail::affine_sphere_immersion(model, A, Vec::Zero(m));
    }
    case ModelKind::HalfSpace: {
      const double mt = mu / model.kappa;
      if (!(mt < -1.0)) throw std::invalid_argument("round_sphere: half-space model needs mu < -kappa");
      const double r = -1.0 / (mt + 1.0);
      Vec c = Vec::Zero(m);
      c(m - 1) = mt / (mt + 1.0);
      return detail::affine_sphere_immersion(model, (r / model.kappa) * Mat::Identity(m, m),
                                             c / model.kappa);
    }
    case ModelKind::Ball: {
      const double t = ball_sphere_coordinate_radius(mu, model.kappa);
      return detail::affine_sphere_immersion(model, t * Mat::Identity(m, m), Vec::Zero(m));
    }
    case ModelKind::Hyperboloid: {
      // Built in the ball model and converted.
      return convert_immersion(round_sphere(SpaceFormModel::ball(m, model.kappa), mu), model);
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Normal translation flow.
// ---------------------------------------------------------------------------

/// Closed-form principal curvature of the normal translate at distance r:
/// lambda(r) = (lambda - kappa tanh(kappa r)) / (1 - (lambda/kappa) tanh(kappa r)),
/// for lambda < kappa, r >= 0.
inline double curvature_flow_value(double lambda, double r, double kappa) {
  if (!(lambda < kappa)) throw std::invalid_argument("curvature_flow_value: need lambda < kappa");
  if (r < 0.0) throw std::invalid_argument("curvature_flow_value: need r >= 0");
  const double t = std::tanh(kappa * r);
  const double denom = 1.0 - (lambda / kappa) * t;
  // lambda < kappa and t in [0,1) keep the denominator positive.
  if (!(denom > 0.0)) throw std::logic_error("curvature_flow_value: pole reached");
  return (lambda - kappa * t) / denom;
}

/// Normal translation f_r(p) = exp_{f(p)}(r nu_f(p)), realized in the
/// hyperboloid model as cosh(kappa r) X + sinh(kappa r) N / kappa. When
/// `validate` is given, the hypothesis (curvatures < kappa, so the factor
/// cosh(kappa r) - (lambda/kappa) sinh(kappa r) stays positive) is checked at
/// its sample points first.
inline Immersion normal_flow(const Immersion& f, double r, const SphereMesh* validate = nullptr) {
  if (!f.model.hyperbolic()) throw std::invalid_argument("normal_flow: hyperbolic model required");
  if (r < 0.0) throw std::invalid_argument("normal_flow: need r >= 0");
  const SpaceFormModel hyp = SpaceFormModel::hyperboloid(f.model.ambient_dim, f.model.kappa);
  const Immersion fh = convert_immersion(f, hyp);
  if (validate) {
    const CurvatureRange range = curvature_range(fh, *validate);
    const double factor = std::cosh(hyp.kappa * r) -
                          (range.lambda_max / hyp.kappa) * std::sinh(hyp.kappa * r);
    if (!(range.lambda_max < hyp.kappa) || !(factor > 0.0))
      throw std::runtime_error("normal_flow: hypothesis violated (lambda_max = " +
                               std::to_string(range.lambda_max) + " at chart " +
                               to_string(range.argmax.chart) + ")");
  }
  Immersion out;
  out.model = hyp;
  out.fd_step = f.fd_step;
  const double ch = std::cosh(hyp.kappa * r);
  const double sh = std::sinh(hyp.kappa * r) / hyp.kappa;
  const double kappa = hyp.kappa;
  out.eval = [fh, ch, sh, kappa](const ChartPoint& p) -> Vec {
    const Jet2Sample j = jet(fh, p);
    Vec F = ch * j.value + sh * unit_normal(fh, j);
    // large r loses quadric precision to cancellation; rescale back on
    const double q = detail::lorentz_dot(F, F);
    if (q < 0.0) F /= kappa * std::sqrt(-q);
    return F;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Retractions onto round spheres.
// ---------------------------------------------------------------------------

/// Euclidean retraction f_s = (1-s) f + s (sigma o nu_f), sigma the round
/// sphere of curvature mu. Implemented for I < 0; the positive side goes
/// through switch_side().
inline Immersion euclidean_retraction(const Immersion& f, double mu, double s) {
  if (f.model.kind != ModelKind::Euclidean)
    throw std::invalid_argument("euclidean_retraction: Euclidean model required");
  if (!(mu < 0.0))
    throw std::invalid_argument("euclidean_retraction: built for I < 0 (compose with switch_side for I > 0)");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("euclidean_retraction: s in [0,1]");
  Immersion out;
  out.model = f.model;
  out.fd_step = f.fd_step;
  const Immersion base = f;
  out.eval = [base, mu, s](const ChartPoint& p) -> Vec {
    const Jet2Sample j = jet(base, p);
    return (1.0 - s) * j.value + s * (-1.0 / mu) * unit_normal(base, j);
  };
  return out;
}

/// Predicted principal curvature along the Euclidean retraction:
/// [(1-s)/lambda + s/mu]^{-1}.
inline double euclidean_retraction_lambda(double lambda, double mu, double s) {
  return 1.0 / ((1.0 - s) / lambda + s / mu);
}

/// Half-space retraction f_s = (1-s) f + s (sigma o nu_bar_f), coordinatewise
/// in half-space coordinates.
inline Immersion halfspace_retraction(const Immersion& f, double mu, double s) {
  if (f.model.kind != ModelKind::HalfSpace)
    throw std::invalid_argument("halfspace_retraction: half-space model required");
  const double kappa = f.model.kappa;
  if (!(mu < -kappa))
    throw std::invalid_argument("halfspace_retraction: built for I < -kappa");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("halfspace_retraction: s in [0,1]");
  const Immersion sigma = round_sphere(f.model, mu);
  Immersion out;
  out.model = f.model;
  out.fd_step = f.fd_step;
  const Immersion base = f;
  out.eval = [base, sigma, s](const ChartPoint& p) -> Vec {
    const Jet2Sample j = jet(base, p);
    const Vec nu_bar = euclidean_unit_normal(base, j);
    // sigma evaluated at the unit vector nu_bar directly (affine constructor)
    const Vec h = sigma.eval(chart_of(nu_bar));
    return (1.0 - s) * j.value + s * h;
  };
  return out;
}

/// The positive factor rho with d(sigma o nu_bar)(u) = rho df(u) at a
/// principal pair (u, lambda): rho = (r/(kappa f^{n+1})) (nu_bar^{n+1} - lambda/kappa),
/// r the Euclidean radius factor of sigma.
inline double halfspace_retraction_rho(const Immersion& f, const ChartPoint& p, double lambda,
                                       double mu) {
  const double kappa = f.model.kappa;
  const double mt = mu / kappa;
  const double r = -1.0 / (mt + 1.0);
  const Jet2Sample j = jet(f, p);
  const Vec nu_bar = euclidean_unit_normal(f, j);
  const int last = f.model.ambient_dim - 1;
  return (r / kappa) * (nu_bar(last) - lambda / kappa) / j.value(last);
}

/// Predicted principal curvature along the half-space retraction:
/// ((1-s) lambda + s rho mu) / ((1-s) + s rho).
inline double halfspace_retraction_lambda(double lambda, double mu, double s, double rho) {
  return ((1.0 - s) * lambda + s * rho * mu) / ((1.0 - s) + s * rho);
}

/// Composition with the fixed reflection rho of S^n; maps curvatures in I to
/// curvatures in -I.
struct SwitchedImmersion {
  Immersion immersion;
  CurvatureInterval interval;
};

inline SwitchedImmersion switch_side(const Immersion& f, const CurvatureInterval& I) {
  return {precompose(f, SphereDiffeo::reflection(f.model.n())), I.negated()};
}

// ---------------------------------------------------------------------------
// Deformation paths and invariant tracking.
// ---------------------------------------------------------------------------

enum class DeformationKind { NormalFlow, EuclideanRetraction, HalfSpaceRetraction, OverlapPath };

inline std::string to_string(DeformationKind k) {
  switch (k) {
    case DeformationKind::NormalFlow: return "normal-flow";
    case DeformationKind::EuclideanRetraction: return "euclidean-retraction";
    case DeformationKind::HalfSpaceRetraction: return "halfspace-retraction";
    case DeformationKind::OverlapPath: return "overlap-path";
  }
  return "?";
}

/// One-parameter family of immersions with f at s = 0. `at` must be pure
/// (calls from concurrent workers are fine).
struct DeformationPath {
  DeformationKind kind;
  Immersion source;
  double mu = 0.0;
  CurvatureInterval interval;
  double s_max = 1.0;  // 2 for the overlap path
  std::function<Immersion(double)> at;
};

inline DeformationPath normal_flow_path(const Immersion& f, double r_max,
                                        const CurvatureInterval& I) {
  DeformationPath path;
  path.kind = DeformationKind::NormalFlow;
  path.source = f;
  path.interval = I;
  path.at = [f, r_max](double s) { return s <= 0.0 ? f : normal_flow(f, s * r_max); };
  return path;
}

inline DeformationPath euclidean_retraction_path(const Immersion& f, double mu,
                                                 const CurvatureInterval& I) {
  DeformationPath path;
  path.kind = DeformationKind::EuclideanRetraction;
  path.source = f;
  path.mu = mu;
  path.interval = I;
  path.at = [f, mu](double s) { return s <= 0.0 ? f : euclidean_retraction(f, mu, s); };
  return path;
}

inline DeformationPath halfspace_retraction_path(const Immersion& f, double mu,
                                                 const CurvatureInterval& I) {
  DeformationPath path;
  path.kind = DeformationKind::HalfSpaceRetraction;
  path.source = f;
  path.mu = mu;
  path.interval = I;
  path.at = [f, mu](double s) { return s <= 0.0 ? f : halfspace_retraction(f, mu, s); };
  return path;
}

/// Overlap-case path in the ball model, s in [0, 2]:
///   s <= 1: Euclidean homothety by tau(s) = 1 + s(tau-1) of the normal
///           translate at r(s) = tan(s * arctan(r_cap)); the ideal-boundary
///           collapse at s -> 1 is cut off at r_cap, where the flow is
///           numerically stationary in curvature.
///   s > 1:  straight-line blend (in ball coordinates) from the capped
///           translate down to sigma o nu_hat_f, which it reaches exactly at
///           s = 2.
inline DeformationPath overlap_path(const Immersion& f, double mu, double tau, double r_cap = 8.0) {
  if (f.model.kind != ModelKind::Ball)
    throw std::invalid_argument("overlap_path: ball model required");
  const double kappa = f.model.kappa;
  if (!(mu < -kappa)) throw std::invalid_argument("overlap_path: need mu < -kappa");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("overlap_path: tau in (0,1)");

  const SpaceFormModel ball = f.model;
  const SpaceFormModel hyp = SpaceFormModel::hyperboloid(ball.ambient_dim, kappa);
  const Immersion fh = convert_immersion(f, hyp);
  const double t_mu = ball_sphere_coordinate_radius(mu, kappa);
  const double angle = std::atan(r_cap);

  auto translate_in_ball = [fh, hyp, ball](const ChartPoint& p, double r) -> Vec {
    const Jet2Sample j = jet(fh, p);
    Vec X = std::cosh(hyp.kappa * r) * j.value +
            (std::sinh(hyp.kappa * r) / hyp.kappa) * unit_normal(fh, j);
    const double q = detail::lorentz_dot(X, X);
    if (q < 0.0) X /= hyp.kappa * std::sqrt(-q);
    return convert(X, hyp, ball);
  };

  DeformationPath path;
  path.kind = DeformationKind::OverlapPath;
  path.source = f;
  path.mu = mu;
  path.s_max = 2.0;
  path.at = [f, ball, translate_in_ball, tau, angle, r_cap, t_mu](double s) -> Immersion {
    Immersion out;
    out.model = ball;
    out.fd_step = f.fd_step;
    if (s <= 0.0) return f;
    if (s <= 1.0) {
      const double r = std::tan(s * angle);
      const double scale = 1.0 + s * (tau - 1.0);
      out.eval = [translate_in_ball, r, scale](const ChartPoint& p) -> Vec {
        return scale * translate_in_ball(p, r);
      };
    } else {
      const double w = s - 1.0;
      out.eval = [f, translate_in_ball, tau, r_cap, t_mu, w](const ChartPoint& p) -> Vec {
        const Vec far = tau * translate_in_ball(p, r_cap);
        const Vec end = t_mu * visual_gauss(f, p);
        return (1.0 - w) * far + w * end;
      };
    }
    return out;
  };
  return path;
}

/// Per-step record along a deformation.
struct HomotopyStep {
  double s = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double immersivity = 0.0;   // min over the mesh of sqrt(lambda_min(g))
  double gauss_drift = 0.0;   // max angle to the s = 0 Gauss map
  bool immersed = false;
  bool in_interval = false;
  double interval_margin = 0.0;
  std::string error;
};

struct HomotopyReport {
  DeformationKind kind;
  CurvatureInterval interval;
  std::vector<HomotopyStep> steps;
  bool pass = false;
  double max_drift = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  int first_failure = -1;  // index into steps

  std::string failure_reason() const {
    if (first_failure < 0) return "";
    const HomotopyStep& st = steps[first_failure];
    if (!st.error.empty()) return st.error;
    if (!st.immersed) return "immersion lost";
    if (!st.in_interval) return "curvature left the interval";
    return "gauss-map drift above tolerance";
  }
};

namespace detail {

/// The invariant Gauss map tracked along each deformation kind.
inline std::function<Vec(const Immersion&, const ChartPoint&)> tracked_gauss_map(
    DeformationKind kind) {
  switch (kind) {
    case DeformationKind::EuclideanRetraction:
      return [](const Immersion& f, const ChartPoint& p) {
        return unit_normal(f, jet(f, p));
      };
    case DeformationKind::HalfSpaceRetraction:
      return [](const Immersion& f, const ChartPoint& p) { return flat_gauss(f, p); };
    case DeformationKind::NormalFlow:
    case DeformationKind::OverlapPath:
      return [](const Immersion& f, const ChartPoint& p) -> Vec { return visual_gauss(f, p); };
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

/// Evaluates every step of the path over the mesh: curvature extrema,
/// immersivity margin, drift of the designated Gauss map from its s = 0
/// value, and the interval verdict. Near-violations (margin below
/// `refine_margin`) trigger bisection refinement between neighbouring steps.
/// Failed steps stay in the report.
inline HomotopyReport track(const DeformationPath& path, const SphereMesh& mesh, int steps,
                            const CurvatureInterval& I, double drift_tol = 1e-6,
                            double refine_margin = 1e-8, int max_refinements = 16) {
  if (steps < 2) throw std::invalid_argument("track: need at least 2 steps");
  const auto gauss = detail::tracked_gauss_map(path.kind);

  std::vector<Vec> baseline(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) { baseline[v] = gauss(path.source, mesh.charts[v]); });

  auto eval_step = [&](double s) {
    HomotopyStep st;
    st.s = s;
    st.lambda_min = std::numeric_limits<double>::infinity();
    st.lambda_max = -std::numeric_limits<double>::infinity();
    st.immersivity = std::numeric_limits<double>::infinity();
    st.immersed = true;
    try {
      const Immersion fs = path.at(s);
      std::mutex mtx;
      parallel_for(mesh.size(), [&](std::size_t v) {
        const ShapeData sd = shape_data(fs, mesh.charts[v]);
        Eigen::SelfAdjointEigenSolver<Mat> ges(sd.g);
        const double sg = std::sqrt(std::max(0.0, ges.eigenvalues().minCoeff()));
        const Vec gm = gauss(fs, mesh.charts[v]);
        const double drift = angle_between(gm, baseline[v]);
        std::lock_guard<std::mutex> lock(mtx);
        st.lambda_min = std::min(st.lambda_min, sd.lambdas(0));
        st.lambda_max = std::max(st.lambda_max, sd.lambdas(sd.lambdas.size() - 1));
        st.immersivity = std::min(st.immersivity, sg);
        st.gauss_drift = std::max(st.gauss_drift, drift);
      });
    } catch (const NotImmersionError& e) {
      st.immersed = false;
      st.error = e.what();
    } catch (const std::exception& e) {
      st.immersed = false;
      st.error = e.what();
    }
    st.interval_margin = std::min(I.margin(st.lambda_min), I.margin(st.lambda_max));
    st.in_interval = st.immersed && st.interval_margin >= -CurvatureInterval::kMemberTol;
    return st;
  };

  HomotopyReport report;
  report.kind = path.kind;
  report.interval = I;
  for (int k = 0; k < steps; ++k)
    report.steps.push_back(eval_step(path.s_max * k / double(steps - 1)));

  // Bisect around near-violations.
  for (int pass_count = 0; pass_count < max_refinements; ++pass_count) {
    int worst = -1;
    double worst_margin = refine_margin;
    for (int i = 0; i < static_cast<int>(report.steps.size()); ++i) {
      const auto& st = report.steps[i];
      if (st.immersed && st.in_interval && st.interval_margin < worst_margin) {
        worst_margin = st.interval_margin;
        worst = i;
      }
    }
    if (worst < 0) break;
    bool inserted = false;
    for (int side = 0; side < 2; ++side) {
      const int nb = worst + (side == 0 ? -1 : 1);
      if (nb < 0 || nb >= static_cast<int>(report.steps.size())) continue;
      const double mid = 0.5 * (report.steps[worst].s + report.steps[nb].s);
      bool present = false;
      for (const auto& st : report.steps) present = present || std::abs(st.s - mid) < 1e-12;
      if (present) continue;
      report.steps.push_back(eval_step(mid));
      inserted = true;
    }
    if (!inserted) break;
    std::sort(report.steps.begin(), report.steps.end(),
              [](const HomotopyStep& a, const HomotopyStep& b) { return a.s < b.s; });
  }

  report.pass = true;
  for (int i = 0; i < static_cast<int>(report.steps.size()); ++i) {
    const auto& st = report.steps[i];
    report.max_drift = std::max(report.max_drift, st.gauss_drift);
    report.worst_margin = std::min(report.worst_margin, st.interval_margin);
    const bool ok = st.immersed && st.in_interval && st.gauss_drift <= drift_tol;
    if (!ok && report.first_failure < 0) report.first_failure = i;
    report.pass = report.pass && ok;
  }
  return report;
}

/// Decreasing search tau_k = 1 - 2^{-k}/2 for the first homothety factor
/// whose overlap path stays in I; gives up after max_k steps.
struct OverlapSearchResult {
  double tau = 0.0;
  int k = -1;
  HomotopyReport report;
  bool found = false;
};

// The homotheties in the overlap path are not isometries, so no nu_hat
// invariance is claimed along it: the drift is recorded but not gated.
inline OverlapSearchResult find_overlap_tau(const Immersion& f, double mu,
                                            const CurvatureInterval& I, const SphereMesh& mesh,
                                            int steps = 33, int max_k = 20,
                                            double drift_tol = std::numeric_limits<double>::infinity()) {
  OverlapSearchResult result;
  for (int k = 0; k <= max_k; ++k) {
    const double tau = 1.0 - std::pow(2.0, -k) * 0.5;
    const DeformationPath path = overlap_path(f, mu, tau);
    HomotopyReport report = track(path, mesh, steps, I, drift_tol);
    if (report.pass) {
      result.tau = tau;
      result.k = k;
      result.report = std::move(report);
      result.found = true;
      return result;
    }
    if (k == max_k) result.report = std::move(report);  // keep the last failure
  }
  return result;
}

}  // namespace sphereform
