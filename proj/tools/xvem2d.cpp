#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "xvem/config.hpp"
#include "xvem/vtk.hpp"

using namespace xvem;

namespace {

void print_report(const Report& r, const RunConfig& c) {
  std::printf("experiment %s  config %s\n", r.experiment.c_str(), r.hash.c_str());
  if (r.n_elements > 0) std::printf("mesh: %d vertices, %d elements, h_max %.6g\n", r.n_vertices, r.n_elements, r.h_max);
  std::printf("%-20s %6s %10s %8s %14s %12s %12s %12s %10s\n", "method", "n", "h", "dofs", "energy", "rel_error", "K_I",
              "K_II", "time[s]");
  for (const auto& row : r.rows)
    std::printf("%-20s %6d %10.5g %8d %14.8e %12.4e %12.6f %12.6f %10.3f\n", row.label.c_str(), row.n, row.h,
                row.n_dofs, row.energy, row.rel_error, row.K_I, row.K_II, row.wall_time);
  if (r.slope) std::printf("fitted slope %.4f\n", *r.slope);
  if (c.experiment == Experiment::extended_patch || c.experiment == Experiment::discontinuous_patch)
    for (const auto& row : r.rows) std::printf("max nodal error %.3e\n", row.max_dof_error);
}

int execute(const RunConfig& c) {
  ConfigRun run = run_config(c);
  print_report(run.report, c);
  write_report(run.report, c.mesh.type == MeshKind::quad ? "quad" : "poly", c.kernel.alpha, c.output);
  if (!c.output.vtk.empty()) {
    if (!run.model) throw std::invalid_argument("output.vtk: this experiment keeps no solved model");
    write_vtk(*run.model, run.u, c.output.vtk);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended virtual element solver for 2D linear elastic fracture"};
  app.require_subcommand(1);

  RunConfig c;
  std::string config_path, mesh_kind = "quad", enrichment = "geom", plane = "strain", patch_kind = "extended";
  std::string dump_config;
  double beta = 0.0;
  bool incl_convergence = false;
  std::optional<double> mouth_y;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--alpha", c.kernel.alpha, "stabilization scale")->capture_default_str();
    s->add_option("--E", c.material.E, "Young's modulus")->capture_default_str();
    s->add_option("--nu", c.material.nu, "Poisson's ratio")->capture_default_str();
    s->add_option("--plane", plane, "strain|stress")->capture_default_str();
    s->add_option("--sif-radius", c.sif_radius, "interaction integral radius r_d")->capture_default_str();
    s->add_option("--results", c.output.results, "JSON report path");
    s->add_option("--csv", c.output.csv, "CSV table path");
    s->add_option("--vtk", c.output.vtk, "legacy VTK output of the last solution");
    s->add_option("--write-config", dump_config, "write the effective configuration and exit");
  };

  auto* run = app.add_subcommand("run", "run a JSON configuration");
  run->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--results", c.output.results, "override output.results");
  run->add_option("--csv", c.output.csv, "override output.csv");
  run->add_option("--vtk", c.output.vtk, "override output.vtk");

  auto* bench = app.add_subcommand("benchmark", "single run of the square-with-edge-crack benchmark");
  bench->add_option("--mesh", mesh_kind, "quad|poly")->capture_default_str();
  bench->add_option("--n", c.mesh.n, "cells per side (quad) or cell count (poly)")->capture_default_str();
  bench->add_option("--enrichment", enrichment, "vem|topo|geom")->capture_default_str();
  bench->add_option("--radius", c.radius, "geometric enrichment radius")->capture_default_str();
  add_common(bench);

  auto* conv = app.add_subcommand("convergence", "energy-error convergence on the benchmark");
  conv->add_option("--mesh", mesh_kind, "quad|poly")->capture_default_str();
  conv->add_option("--sizes", c.mesh.sizes, "mesh sizes")->capture_default_str();
  conv->add_option("--enrichment", enrichment, "vem|topo|geom")->capture_default_str();
  conv->add_option("--radius", c.radius, "geometric enrichment radius")->capture_default_str();
  add_common(conv);

  auto* patch = app.add_subcommand("patch-test", "extended or discontinuous patch test");
  patch->add_option("--kind", patch_kind, "extended|discontinuous")->capture_default_str();
  patch->add_option("--mesh", mesh_kind, "quad|poly (extended)")->capture_default_str();
  add_common(patch);

  auto* incl = app.add_subcommand("inclined", "inclined edge crack in a plate under tension");
  incl->add_option("--beta", beta, "crack angle in radians")->capture_default_str();
  incl->add_option("--nx", c.inclined.nx)->capture_default_str();
  incl->add_option("--ny", c.inclined.ny)->capture_default_str();
  incl->add_option("--mouth-y", mouth_y, "height of the crack mouth (default mid-height)");
  incl->add_flag("--convergence", incl_convergence, "energy convergence over inclined.h_sequence instead of one run");
  incl->add_option("--radius", c.radius, "geometric enrichment radius")->capture_default_str();
  add_common(incl);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      RunConfig base = read_config(config_path);
      if (!c.output.results.empty()) base.output.results = c.output.results;
      if (!c.output.csv.empty()) base.output.csv = c.output.csv;
      if (!c.output.vtk.empty()) base.output.vtk = c.output.vtk;
      c = base;
    } else {
      c.material.plane = parse_plane(plane);
      c.mesh.type = parse_mesh_kind(mesh_kind);
      c.enrichment = parse_enrichment(enrichment);
      if (bench->parsed()) {
        c.experiment = Experiment::benchmark;
      } else if (conv->parsed()) {
        c.experiment = Experiment::convergence;
        if (c.mesh.type == MeshKind::poly && !conv->count("--sizes")) c.mesh.sizes = {64, 256, 1024, 4096};
      } else if (patch->parsed()) {
        if (patch_kind == "extended") c.experiment = Experiment::extended_patch;
        else if (patch_kind == "discontinuous") c.experiment = Experiment::discontinuous_patch;
        else throw std::invalid_argument("--kind must be extended or discontinuous");
        if (c.experiment == Experiment::discontinuous_patch) c.mesh.type = MeshKind::quad;
        c.mesh.n = c.mesh.type == MeshKind::poly ? 64 : 5;
      } else {
        c.experiment = incl_convergence ? Experiment::inclined_convergence : Experiment::inclined;
        c.inclined.beta = beta;
        c.inclined.mouth_y = mouth_y;
      }
      if (!dump_config.empty()) {
        c.validate();
        write_config(c, dump_config);
        std::printf("wrote %s (config %s)\n", dump_config.c_str(), config_hash(c).c_str());
        return 0;
      }
    }
    return execute(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
