#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sphereform/catalog.hpp"

namespace sphereform {
namespace io {

using nlohmann::json;

/// Rounding applied to tolerant floating-point fields before serialization,
/// so that reruns serialize identically.
inline double round_tolerant(double x) {
  if (!std::isfinite(x)) return x;
  return std::round(x * 1e9) / 1e9;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV artifacts. Column sets are fixed and versioned in the header comment.
// ---------------------------------------------------------------------------

/// Curvature field rows: chart, chart coordinates, principal curvatures,
/// Gauss-Kronecker product.
inline void write_curvature_csv(const std::filesystem::path& path, const Immersion& f,
                                const SphereMesh& mesh) {
  auto out = detail::open_out(path);
  const int n = mesh.n;
  out << "# sphereform curvature-field v1\nchart";
  for (int i = 0; i < n; ++i) out << ",x" << i + 1;
  for (int i = 0; i < n; ++i) out << ",lambda" << i + 1;
  out << ",K\n";
  std::vector<std::string> rows(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) {
    const ChartPoint& p = mesh.charts[v];
    const ShapeData sd = shape_data(f, p);
    std::ostringstream line;
    line << std::setprecision(17) << to_string(p.chart);
    for (int i = 0; i < n; ++i) line << ',' << p.x(i);
    for (int i = 0; i < n; ++i) line << ',' << sd.lambdas(i);
    line << ',' << gaussian_curvature(sd);
    rows[v] = line.str();
  });
  for (const auto& r : rows) out << r << '\n';
}

/// Sphere-map rows: source vertex, image vertex, Jacobian determinant.
inline void write_sphere_map_csv(const std::filesystem::path& path, const SphereMap& map,
                                 const SphereMesh& mesh, const JacobianField& field) {
  auto out = detail::open_out(path);
  const int n = mesh.n;
  out << "# sphereform sphere-map v1";
  out << "\nmap=" << map.name << '\n';
  for (int i = 0; i <= n; ++i) out << (i ? "," : "") << 'p' << i + 1;
  for (int i = 0; i <= n; ++i) out << ",q" << i + 1;
  out << ",detJ\n";
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    const Vec q = map.eval(mesh.vertices[v]);
    for (int i = 0; i <= n; ++i) out << (i ? "," : "") << mesh.vertices[v](i);
    for (int i = 0; i <= n; ++i) out << ',' << q(i);
    out << ',' << field.samples[v].det << '\n';
  }
}

/// Homotopy report: one row per tracked step.
inline void write_homotopy_csv(const std::filesystem::path& path, const HomotopyReport& report) {
  auto out = detail::open_out(path);
  out << "# sphereform homotopy v1\n"
      << "s,lambda_min,lambda_max,immersivity,gauss_drift,in_interval,interval_margin,error\n";
  for (const auto& st : report.steps) {
    out << st.s << ',' << st.lambda_min << ',' << st.lambda_max << ',' << st.immersivity << ','
        << st.gauss_drift << ',' << (st.in_interval ? 1 : 0) << ',' << st.interval_margin << ','
        << (st.error.empty() ? "-" : st.error) << '\n';
  }
}

inline json homotopy_summary_json(const HomotopyReport& report) {
  json j;
  j["kind"] = to_string(report.kind);
  j["steps"] = report.steps.size();
  j["pass"] = report.pass;
  j["max_drift"] = round_tolerant(report.max_drift);
  j["worst_margin"] = round_tolerant(report.worst_margin);
  if (report.first_failure >= 0) {
    j["first_failure_step"] = report.first_failure;
    j["first_failure_s"] = round_tolerant(report.steps[report.first_failure].s);
    j["failure_reason"] = report.failure_reason();
  }
  return j;
}

inline json degree_json(const DegreeResult& deg) {
  return json{{"map", deg.map},
              {"mesh_level", deg.mesh_level},
              {"raw", round_tolerant(deg.raw)},
              {"rounded", deg.rounded},
              {"residual", round_tolerant(deg.residual)}};
}

/// OBJ export of an n = 2 immersion over an icosphere, with per-vertex
/// principal curvatures in a sidecar CSV next to the .obj.
inline void write_obj(const std::filesystem::path& path, const Immersion& f,
                      const SphereMesh& mesh) {
  if (mesh.n != 2) throw std::invalid_argument("write_obj: n = 2 meshes only");
  auto out = detail::open_out(path);
  out << "# sphereform surface export v1\n"
      << "# per-vertex curvature attributes: " << path.filename().string() << ".curvature.csv\n";
  std::vector<Vec> positions(mesh.size());
  std::vector<Vec> lambdas(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t v) {
    const ShapeData sd = shape_data(f, mesh.charts[v]);
    positions[v] = f.eval(mesh.charts[v]);
    lambdas[v] = sd.lambdas;
  });
  for (const auto& p : positions) {
    out << "v";
    for (int i = 0; i < p.size(); ++i) out << ' ' << p(i);
    out << '\n';
  }
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';

  auto side = detail::open_out(path.string() + ".curvature.csv");
  side << "# sphereform vertex-curvature v1\nvertex,lambda1,lambda2,K\n";
  for (std::size_t v = 0; v < mesh.size(); ++v)
    side << v << ',' << lambdas[v](0) << ',' << lambdas[v](1) << ','
         << lambdas[v](0) * lambdas[v](1) << '\n';
}

// ---------------------------------------------------------------------------
// Catalog manifest.
// ---------------------------------------------------------------------------

inline json model_json(const SpaceFormModel& m) {
  return json{{"kind", to_string(m.kind)}, {"ambient_dim", m.ambient_dim}, {"kappa", m.kappa}};
}

inline SpaceFormModel model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("ambient_dim").get<int>();
  const double kappa = j.at("kappa").get<double>();
  if (kind == "euclidean") return SpaceFormModel::euclidean(dim);
  if (kind == "halfspace") return SpaceFormModel::half_space(dim, kappa);
  if (kind == "ball") return SpaceFormModel::ball(dim, kappa);
  if (kind == "hyperboloid") return SpaceFormModel::hyperboloid(dim, kappa);
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

inline json catalog_manifest_json(const std::vector<catalog::CatalogEntry>& entries) {
  json list = json::array();
  for (const auto& e : entries) {
    json j;
    j["name"] = e.name;
    j["model"] = model_json(e.model);
    j["params"] = e.params;
    j["expected_range"] = {{"lo", e.expected_range.lo}, {"hi", e.expected_range.hi}};
    j["range_provenance"] = e.range_provenance;
    j["range_tol"] = e.range_tol;
    if (e.expected_degree) {
      j["expected_degree"] = *e.expected_degree;
      j["degree_provenance"] = e.degree_provenance;
    }
    list.push_back(std::move(j));
  }
  return json{{"format", "sphereform-catalog v1"}, {"entries", std::move(list)}};
}

inline std::vector<catalog::CatalogEntry> catalog_from_manifest(const json& doc) {
  if (doc.at("format").get<std::string>() != "sphereform-catalog v1")
    throw std::invalid_argument("unsupported catalog format");
  std::vector<catalog::CatalogEntry> out;
  for (const auto& j : doc.at("entries")) {
    catalog::CatalogEntry e;
    e.name = j.at("name").get<std::string>();
    e.model = model_from_json(j.at("model"));
    e.params = j.at("params").get<std::map<std::string, double>>();
    e.expected_range = CurvatureInterval(j.at("expected_range").at("lo").get<double>(),
                                         j.at("expected_range").at("hi").get<double>(), true, true);
    e.range_provenance = j.at("range_provenance").get<std::string>();
    e.range_tol = j.at("range_tol").get<double>();
    if (j.contains("expected_degree")) {
      e.expected_degree = j.at("expected_degree").get<int>();
      e.degree_provenance = j.value("degree_provenance", std::string{});
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

}  // namespace io
}  // namespace sphereform
