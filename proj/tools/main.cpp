// sphereform experiment runner: curvature audits, Gauss-map and degree
// reports, deformation tracking, and the full verification suite.
//
// Exit codes: 0 all verdicts pass, 2 config error, 3 verdict failure,
// 1 unexpected error.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>

#include "sphereform/io.hpp"
#include "sphereform/verify.hpp"

using namespace sphereform;
using nlohmann::json;

namespace {

constexpr int kExitVerdict = 3;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown config field '" + (where.empty() ? key : where + "." + key) + "'");
}

/// Fully parsed experiment description; every field has a default so flags
/// alone can drive a run.
struct ExperimentConfig {
  unsigned seed = 20240817u;
  int threads = 0;
  int mesh_level = 4;
  std::string immersion_name;
  std::map<std::string, double> immersion_params;
  std::optional<CurvatureInterval> interval;
  std::string gauss_map = "euclidean";  // euclidean | flat | visual | check
  // deformation settings
  std::string deform_kind = "halfspace-retraction";
  double mu = -2.0;
  int steps = 33;
  double tau = 0.0;  // 0 = adaptive search
  double r_max = 2.0;
  double drift_tol = 1e-6;
  int obj_every = 0;
  std::filesystem::path out_dir = "out";
  std::string prefix = "run";
};

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  json doc;
  try {
    doc = io::read_json(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  reject_unknown(doc, {"seed", "threads", "mesh_level", "immersion", "interval", "gauss_map",
                       "deform", "output"},
                 "");
  auto number = [&](const json& j, const char* field) -> double {
    if (!j.is_number()) throw ConfigError(std::string("config field '") + field + "' must be a number");
    return j.get<double>();
  };
  if (doc.contains("seed")) cfg.seed = static_cast<unsigned>(number(doc["seed"], "seed"));
  if (doc.contains("threads")) cfg.threads = static_cast<int>(number(doc["threads"], "threads"));
  if (doc.contains("mesh_level")) cfg.mesh_level = static_cast<int>(number(doc["mesh_level"], "mesh_level"));
  if (doc.contains("immersion")) {
    const json& im = doc["immersion"];
    reject_unknown(im, {"name", "params"}, "immersion");
    if (!im.contains("name")) throw ConfigError("config field 'immersion.name' is required");
    cfg.immersion_name = im["name"].get<std::string>();
    if (im.contains("params")) {
      if (!im["params"].is_object()) throw ConfigError("config field 'immersion.params' must be an object");
      for (const auto& [k, v] : im["params"].items())
        cfg.immersion_params[k] = number(v, ("immersion.params." + k).c_str());
    }
  }
  if (doc.contains("interval")) {
    const json& iv = doc["interval"];
    reject_unknown(iv, {"lo", "hi", "lo_closed", "hi_closed"}, "interval");
    const double lo = iv.contains("lo") ? number(iv["lo"], "interval.lo")
                                        : -std::numeric_limits<double>::infinity();
    const double hi = iv.contains("hi") ? number(iv["hi"], "interval.hi")
                                        : std::numeric_limits<double>::infinity();
    try {
      cfg.interval = CurvatureInterval(lo, hi, iv.value("lo_closed", false), iv.value("hi_closed", false));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field 'interval': ") + e.what());
    }
  }
  if (doc.contains("gauss_map")) cfg.gauss_map = doc["gauss_map"].get<std::string>();
  if (doc.contains("deform")) {
    const json& df = doc["deform"];
    reject_unknown(df, {"kind", "mu", "steps", "tau", "r_max", "drift_tol", "obj_every"}, "deform");
    if (df.contains("kind")) cfg.deform_kind = df["kind"].get<std::string>();
    if (df.contains("mu")) cfg.mu = number(df["mu"], "deform.mu");
    if (df.contains("steps")) cfg.steps = static_cast<int>(number(df["steps"], "deform.steps"));
    if (df.contains("tau")) cfg.tau = number(df["tau"], "deform.tau");
    if (df.contains("r_max")) cfg.r_max = number(df["r_max"], "deform.r_max");
    if (df.contains("drift_tol")) cfg.drift_tol = number(df["drift_tol"], "deform.drift_tol");
    if (df.contains("obj_every")) cfg.obj_every = static_cast<int>(number(df["obj_every"], "deform.obj_every"));
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, {"dir", "prefix"}, "output");
    if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
    if (o.contains("prefix")) cfg.prefix = o["prefix"].get<std::string>();
  }
  return cfg;
}

Immersion build_immersion(const ExperimentConfig& cfg) {
  if (cfg.immersion_name.empty())
    throw ConfigError("config field 'immersion.name' is required for this subcommand");
  try {
    return catalog::make(cfg.immersion_name, cfg.immersion_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'immersion': ") + e.what());
  }
}

SphereMap build_map(const ExperimentConfig& cfg, const Immersion& f) {
  if (cfg.gauss_map == "euclidean") return gauss_sphere_map(f);
  if (cfg.gauss_map == "flat") return flat_gauss_sphere_map(f);
  if (cfg.gauss_map == "visual") return visual_gauss_sphere_map(f);
  if (cfg.gauss_map == "check") return check_gauss_sphere_map(f);
  throw ConfigError("config field 'gauss_map' must be euclidean|flat|visual|check");
}

std::filesystem::path artifact(const ExperimentConfig& cfg, const std::string& suffix) {
  return cfg.out_dir / (cfg.prefix + "." + suffix);
}

json interval_json(const CurvatureInterval& I) {
  json j;
  j["lo"] = io::round_tolerant(I.lo);
  j["hi"] = io::round_tolerant(I.hi);
  j["lo_closed"] = I.lo_closed;
  j["hi_closed"] = I.hi_closed;
  return j;
}

int run_curvature(const ExperimentConfig& cfg) {
  const Immersion f = build_immersion(cfg);
  const SphereMesh mesh = f.model.n() == 2 ? SphereMesh::icosphere(cfg.mesh_level)
                                           : SphereMesh::chart_grid(f.model.n(), cfg.mesh_level - 2);
  io::write_curvature_csv(artifact(cfg, "curvature.csv"), f, mesh);
  const CurvatureInterval I = cfg.interval.value_or(CurvatureInterval());
  const CurvatureRange range = curvature_range(f, mesh, I);
  json summary;
  summary["operation"] = "curvature";
  summary["immersion"] = cfg.immersion_name;
  summary["mesh_level"] = cfg.mesh_level;
  summary["samples"] = mesh.size();
  summary["lambda_min"] = io::round_tolerant(range.lambda_min);
  summary["lambda_max"] = io::round_tolerant(range.lambda_max);
  if (cfg.interval) {
    summary["interval"] = interval_json(*cfg.interval);
    summary["inside"] = range.inside;
    summary["margin"] = io::round_tolerant(range.margin);
  }
  io::write_json(artifact(cfg, "summary.json"), summary);
  std::printf("curvature range [%.9f, %.9f] over %zu samples -> %s\n", range.lambda_min,
              range.lambda_max, mesh.size(), artifact(cfg, "curvature.csv").c_str());
  if (cfg.interval && !range.inside) {
    std::fprintf(stderr, "verdict FAIL: curvature leaves I (margin %.3g); see %s\n", range.margin,
                 artifact(cfg, "curvature.csv").c_str());
    return kExitVerdict;
  }
  return 0;
}

int run_gauss(const ExperimentConfig& cfg) {
  const Immersion f = build_immersion(cfg);
  const SphereMesh mesh = SphereMesh::icosphere(cfg.mesh_level);
  const SphereMap map = build_map(cfg, f);
  const JacobianField field = jacobian_field(map, mesh);
  io::write_sphere_map_csv(artifact(cfg, "map.csv"), map, mesh, field);
  json summary;
  summary["operation"] = "gauss";
  summary["map"] = map.name;
  summary["immersion"] = cfg.immersion_name;
  summary["mesh_level"] = cfg.mesh_level;
  summary["all_certified"] = field.all_certified;
  summary["sign"] = field.sign;
  summary["min_abs_det"] = io::round_tolerant(field.min_abs_det);
  io::write_json(artifact(cfg, "summary.json"), summary);
  std::printf("map %s: certified=%s sign=%+d min|detJ|=%.3g -> %s\n", map.name.c_str(),
              field.all_certified ? "yes" : "no", field.sign, field.min_abs_det,
              artifact(cfg, "map.csv").c_str());
  if (!field.all_certified) {
    std::fprintf(stderr, "verdict FAIL: Jacobian not certified everywhere; see detJ column of %s\n",
                 artifact(cfg, "map.csv").c_str());
    return kExitVerdict;
  }
  return 0;
}

int run_degree(const ExperimentConfig& cfg) {
  const Immersion f = build_immersion(cfg);
  const SphereMap map = build_map(cfg, f);
  json summary;
  summary["operation"] = "degree";
  try {
    const DegreeResult deg = degree(map, SphereMesh::icosphere(cfg.mesh_level));
    summary["degree"] = io::degree_json(deg);
    io::write_json(artifact(cfg, "summary.json"), summary);
    std::printf("deg(%s) = %d (raw %.6f, residual %.3g, level %d)\n", map.name.c_str(), deg.rounded,
                deg.raw, deg.residual, deg.mesh_level);
  } catch (const std::runtime_error& e) {
    summary["error"] = e.what();
    io::write_json(artifact(cfg, "summary.json"), summary);
    std::fprintf(stderr, "verdict FAIL: %s\n", e.what());
    return kExitVerdict;
  }
  return 0;
}

int run_deform(const ExperimentConfig& cfg) {
  const Immersion f = build_immersion(cfg);
  const SphereMesh mesh = SphereMesh::icosphere(cfg.mesh_level);
  const CurvatureInterval I = cfg.interval.value_or(CurvatureInterval());

  DeformationPath path;
  json extra;
  double drift_tol = cfg.drift_tol;
  if (cfg.deform_kind == "normal-flow") {
    path = normal_flow_path(f, cfg.r_max, I);
  } else if (cfg.deform_kind == "euclidean-retraction") {
    path = euclidean_retraction_path(f, cfg.mu, I);
  } else if (cfg.deform_kind == "halfspace-retraction") {
    path = halfspace_retraction_path(f, cfg.mu, I);
  } else if (cfg.deform_kind == "overlap-path") {
    drift_tol = std::numeric_limits<double>::infinity();  // no invariance claim here
    if (cfg.tau > 0.0) {
      path = overlap_path(f, cfg.mu, cfg.tau);
      extra["tau"] = cfg.tau;
    } else {
      const auto found = find_overlap_tau(f, cfg.mu, I, mesh, cfg.steps);
      extra["tau"] = found.found ? found.tau : -1.0;
      extra["tau_search_steps"] = found.k < 0 ? 21 : found.k + 1;
      if (!found.found) {
        json summary;
        summary["operation"] = "deform";
        summary["kind"] = cfg.deform_kind;
        summary["pass"] = false;
        summary["tau_search"] = extra;
        io::write_json(artifact(cfg, "summary.json"), summary);
        std::fprintf(stderr, "verdict FAIL: no tau kept the path inside I within 20 search steps\n");
        return kExitVerdict;
      }
      path = overlap_path(f, cfg.mu, found.tau);
    }
  } else {
    throw ConfigError("config field 'deform.kind' must be normal-flow|euclidean-retraction|"
                      "halfspace-retraction|overlap-path");
  }

  const HomotopyReport report = track(path, mesh, cfg.steps, I, drift_tol);
  io::write_homotopy_csv(artifact(cfg, "homotopy.csv"), report);
  json summary;
  summary["operation"] = "deform";
  summary["kind"] = cfg.deform_kind;
  summary["immersion"] = cfg.immersion_name;
  summary["mesh_level"] = cfg.mesh_level;
  summary["interval"] = interval_json(I);
  summary["report"] = io::homotopy_summary_json(report);
  if (!extra.is_null()) summary["tau_search"] = extra;
  io::write_json(artifact(cfg, "summary.json"), summary);

  if (cfg.obj_every > 0 && f.model.n() == 2) {
    for (int k = 0; k < static_cast<int>(report.steps.size()); k += cfg.obj_every) {
      char name[64];
      std::snprintf(name, sizeof(name), "step%03d.obj", k);
      io::write_obj(cfg.out_dir / (cfg.prefix + "." + name), path.at(report.steps[k].s), mesh);
    }
  }

  std::printf("%s: %s over %zu steps (drift %.3g, margin %.3g) -> %s\n", cfg.deform_kind.c_str(),
              report.pass ? "PASS" : "FAIL", report.steps.size(), report.max_drift,
              report.worst_margin, artifact(cfg, "homotopy.csv").c_str());
  if (!report.pass) {
    std::fprintf(stderr, "verdict FAIL at step %d (s = %.6f): %s; see row %d of %s\n",
                 report.first_failure, report.steps[report.first_failure].s,
                 report.failure_reason().c_str(), report.first_failure + 3,
                 artifact(cfg, "homotopy.csv").c_str());
    return kExitVerdict;
  }
  return 0;
}

int run_verify_all(const ExperimentConfig& cfg) {
  verify::Options opt;
  opt.seed = cfg.seed;
  opt.mesh_level = cfg.mesh_level;
  const auto results = verify::run_all(opt);
  json checks = json::array();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-4s %s (%.2fs, margin %.3g)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.label.c_str(), r.seconds, r.margin);
    if (!r.pass) {
      std::fprintf(stderr, "       %s\n", r.details.c_str());
      ++failures;
    }
    // timing is excluded so that reruns serialize identically
    checks.push_back(json{{"id", r.id},
                          {"label", r.label},
                          {"pass", r.pass},
                          {"margin", io::round_tolerant(r.margin)},
                          {"details", r.details}});
  }
  json summary;
  summary["operation"] = "verify-all";
  summary["mesh_level"] = cfg.mesh_level;
  summary["seed"] = cfg.seed;
  summary["passed"] = static_cast<int>(results.size()) - failures;
  summary["total"] = results.size();
  summary["checks"] = std::move(checks);
  io::write_json(artifact(cfg, "summary.json"), summary);
  std::printf("%d/%zu checks passed -> %s\n", static_cast<int>(results.size()) - failures,
              results.size(), artifact(cfg, "summary.json").c_str());
  return failures == 0 ? 0 : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sphereform: curvature-constrained sphere immersions in space forms"};
  app.require_subcommand(1);

  std::string config_path;
  ExperimentConfig overrides;
  bool has_mesh_level = false, has_seed = false, has_threads = false, has_out = false;
  bool has_immersion = false, has_mu = false, has_steps = false, has_map = false, has_prefix = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--mesh-level", overrides.mesh_level, "icosphere subdivision level")
        ->each([&](const std::string&) { has_mesh_level = true; });
    sub->add_option("--seed", overrides.seed, "seed for sampling-based checks")
        ->each([&](const std::string&) { has_seed = true; });
    sub->add_option("--threads", overrides.threads, "worker thread bound (0 = hardware)")
        ->each([&](const std::string&) { has_threads = true; });
    sub->add_option("--out-dir", overrides.out_dir, "artifact directory")
        ->each([&](const std::string&) { has_out = true; });
    sub->add_option("--prefix", overrides.prefix, "artifact filename prefix")
        ->each([&](const std::string&) { has_prefix = true; });
    sub->add_option("--immersion", overrides.immersion_name, "catalog immersion name")
        ->each([&](const std::string&) { has_immersion = true; });
    sub->add_option("--mu", overrides.mu, "target curvature for deformations")
        ->each([&](const std::string&) { has_mu = true; });
    sub->add_option("--steps", overrides.steps, "deformation step count")
        ->each([&](const std::string&) { has_steps = true; });
    sub->add_option("--map", overrides.gauss_map, "gauss map: euclidean|flat|visual|check")
        ->each([&](const std::string&) { has_map = true; });
  };

  CLI::App* curvature = app.add_subcommand("curvature", "sample principal curvatures over a mesh");
  CLI::App* gauss = app.add_subcommand("gauss", "export a modified Gauss map with Jacobians");
  CLI::App* degree_cmd = app.add_subcommand("degree", "topological degree by quadrature");
  CLI::App* deform = app.add_subcommand("deform", "run and track a deformation");
  CLI::App* verify_all = app.add_subcommand("verify-all", "run the full verification suite");
  for (CLI::App* sub : {curvature, gauss, degree_cmd, deform, verify_all}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    if (has_mesh_level) cfg.mesh_level = overrides.mesh_level;
    if (has_seed) cfg.seed = overrides.seed;
    if (has_threads) cfg.threads = overrides.threads;
    if (has_out) cfg.out_dir = overrides.out_dir;
    if (has_prefix) cfg.prefix = overrides.prefix;
    if (has_immersion) cfg.immersion_name = overrides.immersion_name;
    if (has_mu) cfg.mu = overrides.mu;
    if (has_steps) cfg.steps = overrides.steps;
    if (has_map) cfg.gauss_map = overrides.gauss_map;
    max_threads() = cfg.threads;

    if (app.got_subcommand(curvature)) return run_curvature(cfg);
    if (app.got_subcommand(gauss)) return run_gauss(cfg);
    if (app.got_subcommand(degree_cmd)) return run_degree(cfg);
    if (app.got_subcommand(deform)) return run_deform(cfg);
    if (app.got_subcommand(verify_all)) return run_verify_all(cfg);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
