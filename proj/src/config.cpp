#include "xvem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>


namespace xvem {

using nlohmann::json;

Experiment parse_experiment(const std::string& s) {
  if (s == "benchmark") return Experiment::benchmark;
  if (s == "convergence") return Experiment::convergence;
  if (s == "extended-patch") return Experiment::extended_patch;
  if (s == "discontinuous-patch") return Experiment::discontinuous_patch;
  if (s == "inclined") return Experiment::inclined;
  if (s == "inclined-convergence") return Experiment::inclined_convergence;
  throw std::invalid_argument("experiment: unknown id \"" + s + "\"");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::benchmark: return "benchmark";
    case Experiment::convergence: return "convergence";
    case Experiment::extended_patch: return "extended-patch";
    case Experiment::discontinuous_patch: return "discontinuous-patch";
    case Experiment::inclined: return "inclined";
    case Experiment::inclined_convergence: return "inclined-convergence";
  }
  return "?";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

std::string kind_name(MeshKind k) { return k == MeshKind::quad ? "quad" : "poly"; }

json to_json(const RunConfig& c, bool with_output) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["mesh"] = {{"type", kind_name(c.mesh.type)}, {"n", c.mesh.n}, {"sizes", c.mesh.sizes}, {"seed", c.mesh.seed}};
  j["material"] = {{"E", c.material.E},
                   {"nu", c.material.nu},
                   {"plane", c.material.plane == PlaneAssumption::strain ? "strain" : "stress"}};
  json pts = json::array();
  for (const auto& p : c.crack.points) pts.push_back({p.x(), p.y()});
  j["crack"] = {{"points", pts}, {"side", c.crack.side}};
  j["enrichment"] = {{"mode", to_string(c.enrichment)}, {"radius", c.radius}};
  j["stabilization"] = {{"scheme", c.kernel.scheme == StabilizationScheme::dofi ? "dofi" : "drecipe"},
                        {"alpha", c.kernel.alpha}};
  j["quadrature"] = {{"edge_order", c.kernel.edge_order}, {"graded_ratio", c.kernel.graded_ratio}};
  j["sif"] = {{"radius", c.sif_radius}};
  const InclinedSpec& in = c.inclined;
  j["inclined"] = {{"beta", in.beta},     {"width", in.width},         {"height", in.height},
                   {"crack_length", in.crack_length}, {"traction", in.traction}, {"nx", in.nx},
                   {"ny", in.ny},         {"h_sequence", in.h_sequence}, {"reference_h", in.reference_h}};
  j["inclined"]["mouth_y"] = in.mouth_y ? json(*in.mouth_y) : json(nullptr);
  if (with_output) j["output"] = {{"results", c.output.results}, {"csv", c.output.csv}, {"vtk", c.output.vtk}};
  return j;
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  require(mesh.n >= 1, "mesh.n must be positive");
  require(!mesh.sizes.empty(), "mesh.sizes must not be empty");
  for (int n : mesh.sizes) require(n >= 1, "mesh.sizes entries must be positive");
  if (mesh.type == MeshKind::poly) {
    require(mesh.n >= 2 && mesh.n % 2 == 0, "mesh.n must be even for polygonal meshes");
    for (int n : mesh.sizes) require(n >= 2 && n % 2 == 0, "mesh.sizes must be even for polygonal meshes");
  }
  material.validate();
  require(crack.points.size() >= 2, "crack.points needs at least two points");
  for (const auto& p : crack.points) require(p.allFinite(), "crack.points must be finite");
  require(crack.side == "left", "crack.side must be \"left\" (the + side is left of the tip direction)");
  require(std::isfinite(radius) && radius >= 0.0, "enrichment.radius must be non-negative");
  require(enrichment != EnrichmentMode::geometric || radius > 0.0, "enrichment.radius must be positive for geom");
  require(finite_positive(kernel.alpha), "stabilization.alpha must be positive");
  require(kernel.edge_order >= 1 && kernel.edge_order <= 64, "quadrature.edge_order must lie in [1, 64]");
  require(std::isfinite(kernel.graded_ratio) && kernel.graded_ratio >= 0.0, "quadrature.graded_ratio must be non-negative");
  require(finite_positive(sif_radius), "sif.radius must be positive");
  const InclinedSpec& in = inclined;
  require(std::isfinite(in.beta) && std::abs(in.beta) < 0.5 * std::numbers::pi, "inclined.beta must lie in (-pi/2, pi/2)");
  require(finite_positive(in.width) && finite_positive(in.height), "inclined plate size must be positive");
  require(finite_positive(in.crack_length) && in.crack_length * std::cos(in.beta) < in.width,
          "inclined.crack_length must keep the tip inside the plate");
  require(std::isfinite(in.traction), "inclined.traction must be finite");
  require(in.nx >= 1 && in.ny >= 1, "inclined.nx and inclined.ny must be positive");
  if (in.mouth_y) {
    const double y = *in.mouth_y, tip_y = y + in.crack_length * std::sin(in.beta);
    require(y > 0.0 && y < in.height && tip_y > 0.0 && tip_y < in.height, "inclined.mouth_y puts the crack outside the plate");
  }
  for (double h : in.h_sequence) require(finite_positive(h), "inclined.h_sequence entries must be positive");
  require(finite_positive(in.reference_h), "inclined.reference_h must be positive");
}

RunConfig parse_config(const std::string& json_text) {
  RunConfig c;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  try {
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("mesh")) {
      const json& m = j.at("mesh");
      if (m.contains("type")) c.mesh.type = parse_mesh_kind(m.at("type").get<std::string>());
      read_if(m, "n", c.mesh.n);
      read_if(m, "sizes", c.mesh.sizes);
      read_if(m, "seed", c.mesh.seed);
    }
    if (j.contains("material")) {
      const json& m = j.at("material");
      read_if(m, "E", c.material.E);
      read_if(m, "nu", c.material.nu);
      if (m.contains("plane")) c.material.plane = parse_plane(m.at("plane").get<std::string>());
    }
    if (j.contains("crack")) {
      const json& m = j.at("crack");
      if (m.contains("points")) {
        c.crack.points.clear();
        for (const auto& p : m.at("points")) c.crack.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      }
      read_if(m, "side", c.crack.side);
    }
    if (j.contains("enrichment")) {
      const json& m = j.at("enrichment");
      if (m.contains("mode")) c.enrichment = parse_enrichment(m.at("mode").get<std::string>());
      read_if(m, "radius", c.radius);
    }
    if (j.contains("stabilization")) {
      const json& m = j.at("stabilization");
      if (m.contains("scheme")) c.kernel.scheme = parse_stabilization(m.at("scheme").get<std::string>());
      read_if(m, "alpha", c.kernel.alpha);
    }
    if (j.contains("quadrature")) {
      read_if(j.at("quadrature"), "edge_order", c.kernel.edge_order);
      read_if(j.at("quadrature"), "graded_ratio", c.kernel.graded_ratio);
    }
    if (j.contains("sif")) read_if(j.at("sif"), "radius", c.sif_radius);
    if (j.contains("inclined")) {
      const json& m = j.at("inclined");
      InclinedSpec& in = c.inclined;
      read_if(m, "beta", in.beta);
      read_if(m, "width", in.width);
      read_if(m, "height", in.height);
      read_if(m, "crack_length", in.crack_length);
      read_if(m, "traction", in.traction);
      read_if(m, "nx", in.nx);
      read_if(m, "ny", in.ny);
      read_if(m, "h_sequence", in.h_sequence);
      read_if(m, "reference_h", in.reference_h);
      if (m.contains("mouth_y") && !m.at("mouth_y").is_null()) in.mouth_y = m.at("mouth_y").get<double>();
    }
    if (j.contains("output")) {
      const json& m = j.at("output");
      read_if(m, "results", c.output.results);
      read_if(m, "csv", c.output.csv);
      read_if(m, "vtk", c.output.vtk);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) { return to_json(c, true).dump(2); }

RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config_to_json(c) << "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c, false).dump())));
  return buf;
}

namespace {

BenchmarkOptions benchmark_options(const RunConfig& c) {
  BenchmarkOptions o;
  o.mesh = c.mesh.type;
  o.n = c.mesh.n;
  o.rng_seed = c.mesh.seed;
  o.crack_points = c.crack.points;
  o.enrichment = c.enrichment;
  o.radius = c.radius;
  o.material = c.material;
  o.kernel = c.kernel;
  o.sif_radius = c.sif_radius;
  return o;
}

InclinedOptions inclined_options(const RunConfig& c) {
  InclinedOptions o;
  const InclinedSpec& in = c.inclined;
  o.beta = in.beta;
  o.width = in.width;
  o.height = in.height;
  o.crack_length = in.crack_length;
  o.mouth_y = in.mouth_y;
  o.traction = in.traction;
  o.nx = in.nx;
  o.ny = in.ny;
  o.material = c.material;
  o.kernel = c.kernel;
  o.enrichment = c.enrichment;
  o.radius = c.radius;
  o.sif_radius = c.sif_radius;
  return o;
}

void set_mesh_stats(Report& r, const Model& m) {
  r.n_vertices = m.mesh.num_vertices();
  r.n_elements = m.mesh.num_elements();
  r.h_max = m.h_max;
}

}  // namespace

ConfigRun run_config(const RunConfig& c) {
  c.validate();
  ConfigRun out;
  Report& r = out.report;
  r.experiment = to_string(c.experiment);
  r.hash = config_hash(c);
  r.config_json = to_json(c, true).dump();
  switch (c.experiment) {
    case Experiment::benchmark: {
      auto run = run_benchmark(benchmark_options(c));
      r.rows.push_back(run.result);
      set_mesh_stats(r, run.model);
      out.u = run.u;
      out.model.emplace(std::move(run.model));
      break;
    }
    case Experiment::convergence: {
      std::vector<double> h, e;
      for (int n : c.mesh.sizes) {
        BenchmarkOptions o = benchmark_options(c);
        o.n = n;
        auto run = run_benchmark(o);
        r.rows.push_back(run.result);
        h.push_back(run.result.h);
        e.push_back(run.result.rel_error);
        set_mesh_stats(r, run.model);
        out.u = run.u;
        out.model.emplace(std::move(run.model));
      }
      if (h.size() >= 2) r.slope = fit_slope(h, e);
      break;
    }
    case Experiment::extended_patch:
      r.rows.push_back(run_extended_patch_test(c.mesh.type, c.kernel));
      break;
    case Experiment::discontinuous_patch:
      r.rows.push_back(run_discontinuous_patch_test(c.mesh.n % 2 ? c.mesh.n : c.mesh.n + 1, c.kernel));
      break;
    case Experiment::inclined: {
      auto run = run_inclined(inclined_options(c));
      r.rows.push_back(run.result);
      set_mesh_stats(r, run.model);
      out.u = run.u;
      out.model.emplace(std::move(run.model));
      break;
    }
    case Experiment::inclined_convergence: {
      auto st = run_inclined_convergence(inclined_options(c), c.inclined.h_sequence, c.inclined.reference_h);
      r.rows = st.rows;
      if (st.rows.size() >= 2) r.slope = st.slope;
      break;
    }
  }
  return out;
}

std::string report_to_json(const Report& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config_hash"] = r.hash;
  j["config"] = json::parse(r.config_json);
  j["mesh"] = {{"vertices", r.n_vertices}, {"elements", r.n_elements}, {"h_max", r.h_max}};
  j["rows"] = json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"label", row.label},
                         {"n", row.n},
                         {"h", row.h},
                         {"n_dofs", row.n_dofs},
                         {"n_enriched", row.n_enriched},
                         {"energy", row.energy},
                         {"exact_energy", row.exact_energy},
                         {"rel_error", row.rel_error},
                         {"K_I", row.K_I},
                         {"K_II", row.K_II},
                         {"max_dof_error", row.max_dof_error},
                         {"wall_time", row.wall_time},
                         {"solver", row.stats.method},
                         {"backward_error", row.stats.residual}});
  j["slope"] = r.slope ? json(*r.slope) : json(nullptr);
  return j.dump(2);
}

std::string csv_header() { return "mesh,method,alpha,n,h,n_dofs,energy,rel_error,K_I,K_II,wall_time"; }

std::string csv_row(const std::string& mesh, double alpha, const RunResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.6f", mesh.c_str(), r.label.c_str(),
                alpha, r.n, r.h, r.n_dofs, r.energy, r.rel_error, r.K_I, r.K_II, r.wall_time);
  return buf;
}

void write_report(const Report& r, const std::string& mesh, double alpha, const OutputSpec& out) {
  if (!out.results.empty()) {
    std::ofstream f(out.results);
    if (!f) throw std::runtime_error("cannot write " + out.results);
    f << report_to_json(r) << "\n";
  }
  if (!out.csv.empty()) {
    std::ofstream f(out.csv);
    if (!f) throw std::runtime_error("cannot write " + out.csv);
    f << csv_header() << "\n";
    for (const auto& row : r.rows) f << csv_row(mesh, alpha, row) << "\n";
  }
}

}  // namespace xvem
