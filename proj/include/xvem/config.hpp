#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xvem/experiments.hpp"

namespace xvem {

enum class Experiment { benchmark, convergence, extended_patch, discontinuous_patch, inclined, inclined_convergence };

Experiment parse_experiment(const std::string& s);
std::string to_string(Experiment e);

struct MeshSpec {
  MeshKind type = MeshKind::quad;
  int n = 20;                            // cells per side (quad) or cell count (poly)
  std::vector<int> sizes{10, 20, 40, 80};  // convergence sequence
  std::uint64_t seed = 7;
};

// Ordered points, tip last. The + side is to the left of the tip direction; "left" is the
// only convention accepted.
struct CrackSpec {
  std::vector<Vec2> points{Vec2(-1.0, 0.0), Vec2(0.0, 0.0)};
  std::string side = "left";
};

struct InclinedSpec {
  double beta = 0.0;
  double width = 3.0, height = 6.0, crack_length = 1.0;
  std::optional<double> mouth_y;
  double traction = 1.0;
  int nx = 60, ny = 120;
  std::vector<double> h_sequence{0.25, 0.1, 0.05, 0.025};
  double reference_h = 0.0125;
};

struct OutputSpec {
  std::string results;  // JSON report
  std::string csv;      // table rows
  std::string vtk;      // legacy polydata of the last solved model
};

struct RunConfig {
  Experiment experiment = Experiment::benchmark;
  MeshSpec mesh;
  Material material;
  CrackSpec crack;
  EnrichmentMode enrichment = EnrichmentMode::geometric;
  double radius = 0.5;
  KernelOptions kernel;
  double sif_radius = 0.4;
  InclinedSpec inclined;
  OutputSpec output;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& c);
RunConfig read_config(const std::string& path);
void write_config(const RunConfig& c, const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);
// Hash of the canonical JSON without the output paths, as 16 hex digits.
std::string config_hash(const RunConfig& c);

struct Report {
  std::string experiment;
  std::string hash;
  std::string config_json;
  std::vector<RunResult> rows;
  std::optional<double> slope;
  int n_vertices = 0, n_elements = 0;
  double h_max = 0.0;
};

struct ConfigRun {
  Report report;
  std::optional<Model> model;  // last solved model, for plotting
  Vector u;
};

ConfigRun run_config(const RunConfig& c);

std::string report_to_json(const Report& r);
// Header: mesh,method,alpha,n,h,n_dofs,energy,rel_error,K_I,K_II,wall_time
std::string csv_header();
std::string csv_row(const std::string& mesh, double alpha, const RunResult& r);
void write_report(const Report& r, const std::string& mesh, double alpha, const OutputSpec& out);

}  // namespace xvem
