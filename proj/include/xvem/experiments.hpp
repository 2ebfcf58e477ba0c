#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xvem/sif.hpp"
#include "xvem/system.hpp"

namespace xvem {

// Mixed-mode crack-tip field with classical amplitudes K_I, K_II.
class ExactTipField {
 public:
  ExactTipField(const Crack& crack, const Material& mat, double K_I, double K_II);
  Vec2 displacement(const Vec2& x, Side side) const;
  Mat2 gradient(const Vec2& x, Side side) const;
  Mat2 stress(const Vec2& x, Side side) const;

 private:
  Crack crack_;
  Material mat_;
  Eigen::Matrix3d C_;
  double kI_, kII_;
};

// a(u, u) of the exact field on a rectangle, from the boundary form.
double exact_energy(const ExactTipField& field, const Rectangle& domain, const Crack& crack);

enum class MeshKind { quad, poly };
MeshKind parse_mesh_kind(const std::string& s);
EnrichmentMode parse_enrichment(const std::string& s);
std::string to_string(EnrichmentMode m);

// Square (-1,1)^2 with the crack (-1,0)-(0,0).
Rectangle benchmark_domain();
Crack benchmark_crack();
// quad: n x n squares; poly: n cells, Voronoi mirrored about the crack line with a vertex at the tip.
PolygonalMesh benchmark_mesh(MeshKind kind, int n, std::uint64_t rng_seed = 7);

struct RunResult {
  std::string label;
  int n = 0;
  double h = 0.0;
  int n_dofs = 0;
  int n_enriched = 0;
  double energy = 0.0;        // 1/2 a_h of the projected solution
  double exact_energy = 0.0;  // 1/2 a(u,u)
  double rel_error = 0.0;
  double K_I = 0.0, K_II = 0.0;
  double max_dof_error = 0.0;
  double wall_time = 0.0;
  SolveStats stats;
};

struct BenchmarkOptions {
  MeshKind mesh = MeshKind::quad;
  // Tip last. Polygonal meshes are built around the default crack only.
  std::vector<Vec2> crack_points{Vec2(-1.0, 0.0), Vec2(0.0, 0.0)};
  int n = 10;
  std::uint64_t rng_seed = 7;
  EnrichmentMode enrichment = EnrichmentMode::geometric;
  double radius = 0.5;
  Material material;
  KernelOptions kernel;
  double K_I = 1.0, K_II = 1.0;
  // Amplitudes are taken so that enriched DOFs equal 1 (the extended patch test data).
  bool unit_enrichment_amplitude = false;
  bool compute_sif = true;
  double sif_radius = 0.4;
  std::vector<double> extra_sif_radii;
};

struct BenchmarkRun {
  RunResult result;
  std::vector<SifResult> extra_sifs;
  Model model;
  Vector u;
};

BenchmarkRun run_benchmark(const BenchmarkOptions& opt);

// Extended patch test: every node enriched, boundary data = psi_I + psi_II.
RunResult run_extended_patch_test(MeshKind kind, const KernelOptions& kernel = {});
// Two-material-state patch test on the unit square cut by y = 1/2.
RunResult run_discontinuous_patch_test(int n = 5, const KernelOptions& kernel = {});

struct ConvergenceStudy {
  std::vector<RunResult> rows;
  double slope = 0.0;
};

double fit_slope(const std::vector<double>& h, const std::vector<double>& err);
ConvergenceStudy run_convergence(const BenchmarkOptions& base, const std::vector<int>& ns);

struct InclinedOptions {
  double beta = 0.0;
  double width = 3.0, height = 6.0, crack_length = 1.0;
  std::optional<double> mouth_y;  // height of the crack mouth on the left edge; mid-height when unset
  double traction = 1.0;
  int nx = 60, ny = 120;
  Material material;
  KernelOptions kernel;
  EnrichmentMode enrichment = EnrichmentMode::geometric;
  double radius = 0.5;
  double sif_radius = 0.4;
};

struct InclinedRun {
  RunResult result;
  Model model;
  Vector u;
};

InclinedRun run_inclined(const InclinedOptions& opt);

// Energy errors on square meshes of the given sizes against a finer self-reference run.
ConvergenceStudy run_inclined_convergence(const InclinedOptions& base, const std::vector<double>& hs, double reference_h);

}  // namespace xvem
