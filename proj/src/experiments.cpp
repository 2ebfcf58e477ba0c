#include "xvem/experiments.hpp"

#include <chrono>
#include <cmath>

namespace xvem {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

ExactTipField::ExactTipField(const Crack& crack, const Material& mat, double K_I, double K_II)
    : crack_(crack), mat_(mat), C_(elasticity_tensor(mat)), kI_(K_I), kII_(K_II) {}

Vec2 ExactTipField::displacement(const Vec2& x, Side side) const {
  PolarCoords pc = tip_polar_coords(crack_, x, side);
  Vec2 l = kI_ * tip_displacement(mat_, pc.r, pc.theta, Mode::I) + kII_ * tip_displacement(mat_, pc.r, pc.theta, Mode::II);
  return crack_.rotation().transpose() * l * sif_displacement_scale(mat_);
}

Mat2 ExactTipField::gradient(const Vec2& x, Side side) const {
  PolarCoords pc = tip_polar_coords(crack_, x, side);
  Mat2 g = kI_ * tip_displacement_gradient(mat_, pc.r, pc.theta, Mode::I) +
           kII_ * tip_displacement_gradient(mat_, pc.r, pc.theta, Mode::II);
  const Mat2 R = crack_.rotation();
  return R.transpose() * g * R * sif_displacement_scale(mat_);
}

Mat2 ExactTipField::stress(const Vec2& x, Side side) const { return stress_from_gradient(C_, gradient(x, side)); }

double exact_energy(const ExactTipField& field, const Rectangle& d, const Crack& crack) {
  const std::array<Vec2, 4> corners = {Vec2(d.x0, d.y0), Vec2(d.x1, d.y0), Vec2(d.x1, d.y1), Vec2(d.x0, d.y1)};
  const EdgeRule rule = gauss_legendre(20);
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = corners[k], b = corners[(k + 1) % 4];
    const Vec2 dir = b - a;
    const Vec2 n = Vec2(dir.y(), -dir.x()).normalized();
    // split where the crack meets this side
    std::vector<double> cuts = {0.0, 1.0};
    const auto& pts = crack.points();
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      Vec2 cd = pts[s + 1] - pts[s];
      double den = cross(dir, cd);
      if (std::abs(den) < 1e-14) continue;
      double t = cross(pts[s] - a, cd) / den;
      double u = cross(pts[s] - a, dir) / den;
      if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    const int sub = 64;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      for (int i = 0; i < sub; ++i) {
        double s0 = cuts[c] + (cuts[c + 1] - cuts[c]) * i / sub;
        double s1 = cuts[c] + (cuts[c + 1] - cuts[c]) * (i + 1) / sub;
        for (const auto& q : edge_points(a + s0 * dir, a + s1 * dir, rule)) {
          Side side = signed_distance(crack, q.x) >= 0.0 ? Side::plus : Side::minus;
          total += q.w * (field.stress(q.x, side) * n).dot(field.displacement(q.x, side));
        }
      }
  }
  return total;
}

MeshKind parse_mesh_kind(const std::string& s) {
  if (s == "quad") return MeshKind::quad;
  if (s == "poly") return MeshKind::poly;
  throw std::invalid_argument("mesh kind must be quad or poly");
}

EnrichmentMode parse_enrichment(const std::string& s) {
  if (s == "none" || s == "vem") return EnrichmentMode::none;
  if (s == "topo" || s == "topological") return EnrichmentMode::topological;
  if (s == "geom" || s == "geometric") return EnrichmentMode::geometric;
  throw std::invalid_argument("enrichment must be none, topo or geom");
}

std::string to_string(EnrichmentMode m) {
  switch (m) {
    case EnrichmentMode::none: return "vem";
    case EnrichmentMode::topological: return "topo";
    case EnrichmentMode::geometric: return "geom";
  }
  return "?";
}

Rectangle benchmark_domain() { return {-1.0, -1.0, 1.0, 1.0}; }
Crack benchmark_crack() { return Crack({Vec2(-1.0, 0.0), Vec2(0.0, 0.0)}); }

PolygonalMesh benchmark_mesh(MeshKind kind, int n, std::uint64_t rng_seed) {
  const Rectangle dom = benchmark_domain();
  if (kind == MeshKind::quad) return build_structured_quad_mesh(dom, n, n);
  if (n < 2 || n % 2) throw std::invalid_argument("polygonal benchmark mesh needs an even cell count");
  PolygonalMesh mesh = build_mirrored_voronoi_mesh(dom, 0.0, n / 2, rng_seed);
  insert_vertex(mesh, Vec2(0.0, 0.0));
  return mesh;
}

BenchmarkRun run_benchmark(const BenchmarkOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  const Crack crack(opt.crack_points);
  if (opt.mesh == MeshKind::poly && (crack.points() != benchmark_crack().points()))
    throw std::invalid_argument("polygonal benchmark meshes need the default crack");
  ModelOptions mo;
  mo.enrichment = opt.enrichment;
  mo.enrichment_radius = opt.radius;
  mo.kernel = opt.kernel;
  BenchmarkRun run{{}, {}, build_model(benchmark_mesh(opt.mesh, opt.n, opt.rng_seed), crack, opt.material, mo), {}};
  const Model& model = run.model;
  const double scale = sif_displacement_scale(opt.material);
  double kI = opt.K_I, kII = opt.K_II;
  if (opt.unit_enrichment_amplitude) kI = kII = 1.0 / (scale * std::sqrt(model.h_max));
  ExactTipField exact(crack, opt.material, kI, kII);

  BoundaryConditions bcs;
  DirichletCondition dc;
  dc.tags = {"bottom", "right", "top", "left"};
  dc.value = [&exact](const Vec2& x, Side s) { return exact.displacement(x, s); };
  const double sh = std::sqrt(model.h_max);
  dc.enrichment_amplitude = std::array<double, 2>{kI * sh * scale, kII * sh * scale};
  bcs.dirichlet.push_back(dc);

  SparseMatrix K = assemble(model);
  LinearSystem sys = apply_bcs(model, K, bcs);
  RunResult& r = run.result;
  run.u = solve(sys, &r.stats);
  r.label = to_string(opt.enrichment);
  r.n = opt.n;
  r.h = model.h_max;
  r.n_dofs = model.dofs.size;
  r.n_enriched = model.plan.num_enriched_nodes();
  r.energy = strain_energy(model, run.u);
  r.exact_energy = 0.5 * exact_energy(exact, benchmark_domain(), crack);
  r.rel_error = std::abs(r.exact_energy - r.energy) / r.exact_energy;
  if (opt.unit_enrichment_amplitude) {
    // exact DOFs: standard 0, enriched 1
    for (int v = 0; v < model.mesh.num_vertices(); ++v)
      for (int c = 0; c < model.dofs.copies(v); ++c) {
        for (int k = 0; k < 2; ++k) r.max_dof_error = std::max(r.max_dof_error, std::abs(run.u(model.dofs.std_dof(v, c, k))));
        if (model.dofs.enriched[v])
          for (int m = 0; m < 2; ++m)
            r.max_dof_error = std::max(r.max_dof_error, std::abs(run.u(model.dofs.enr_dof(v, c, m)) - 1.0));
      }
  }
  if (opt.compute_sif) {
    SifResult s = extract_sifs(model, run.u, opt.sif_radius);
    r.K_I = s.K_I;
    r.K_II = s.K_II;
    for (double rd : opt.extra_sif_radii) run.extra_sifs.push_back(extract_sifs(model, run.u, rd));
  }
  r.wall_time = seconds_since(t0);
  return run;
}

RunResult run_extended_patch_test(MeshKind kind, const KernelOptions& kernel) {
  BenchmarkOptions opt;
  opt.mesh = kind;
  opt.n = kind == MeshKind::quad ? 10 : 64;
  opt.enrichment = EnrichmentMode::geometric;
  opt.radius = 10.0;
  opt.kernel = kernel;
  opt.unit_enrichment_amplitude = true;
  opt.compute_sif = false;
  auto run = run_benchmark(opt);
  run.result.label = kind == MeshKind::quad ? "extended-patch-quad" : "extended-patch-poly";
  return run.result;
}

RunResult run_discontinuous_patch_test(int n, const KernelOptions& kernel) {
  auto t0 = std::chrono::steady_clock::now();
  if (n < 1 || n % 2 == 0) throw std::invalid_argument("discontinuous patch test needs an odd element count");
  const Rectangle dom{0.0, 0.0, 1.0, 1.0};
  Material mat;
  mat.E = 1.0;
  mat.nu = 0.0;
  mat.plane = PlaneAssumption::strain;
  ModelOptions mo;
  mo.kernel = kernel;
  Crack crack({Vec2(0.0, 0.5), Vec2(1.0, 0.5)});
  Model model = build_model(build_structured_quad_mesh(dom, n, n), crack, mat, mo);

  auto exact = [](const Vec2& x, Side s) { return Vec2((s == Side::plus ? 2.0 : 1.0) * x.x(), 0.0); };
  BoundaryConditions bcs;
  DirichletCondition dc;
  dc.tags = {"left"};
  dc.value = [](const Vec2&, Side) { return Vec2(0.0, 0.0); };
  bcs.dirichlet.push_back(dc);
  TractionCondition tc;
  tc.tags = {"right"};
  tc.traction = [](const Vec2& x, Side) { return Vec2(x.y() > 0.5 ? 2.0 : 1.0, 0.0); };
  bcs.traction.push_back(tc);

  SparseMatrix K = assemble(model);
  LinearSystem sys = apply_bcs(model, K, bcs);
  RunResult r;
  Vector u = solve(sys, &r.stats);
  r.label = "discontinuous-patch";
  r.n = n;
  r.h = model.h_max;
  r.n_dofs = model.dofs.size;
  r.energy = strain_energy(model, u);
  r.exact_energy = 1.25;
  r.rel_error = std::abs(r.exact_energy - r.energy) / r.exact_energy;
  for (int v = 0; v < model.mesh.num_vertices(); ++v) {
    const Vec2& x = model.mesh.vertices[v];
    for (int c = 0; c < model.dofs.copies(v); ++c) {
      Side s = model.dofs.copies(v) == 2 ? (c == 0 ? Side::plus : Side::minus)
                                          : (x.y() > 0.5 ? Side::plus : Side::minus);
      Vec2 ue = exact(x, s);
      for (int k = 0; k < 2; ++k)
        r.max_dof_error = std::max(r.max_dof_error, std::abs(u(model.dofs.std_dof(v, c, k)) - ue(k)));
    }
  }
  r.wall_time = seconds_since(t0);
  return r;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy run_convergence(const BenchmarkOptions& base, const std::vector<int>& ns) {
  ConvergenceStudy st;
  std::vector<double> h, e;
  for (int n : ns) {
    BenchmarkOptions o = base;
    o.n = n;
    auto run = run_benchmark(o);
    st.rows.push_back(run.result);
    h.push_back(run.result.h);
    e.push_back(run.result.rel_error);
  }
  if (ns.size() >= 2) st.slope = fit_slope(h, e);
  return st;
}

InclinedRun run_inclined(const InclinedOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  const Rectangle dom{0.0, 0.0, opt.width, opt.height};
  const Vec2 mouth(0.0, opt.mouth_y.value_or(0.5 * opt.height));
  const Vec2 tip = mouth + opt.crack_length * Vec2(std::cos(opt.beta), std::sin(opt.beta));
  Crack crack({mouth, tip});
  ModelOptions mo;
  mo.enrichment = opt.enrichment;
  mo.enrichment_radius = opt.radius;
  mo.kernel = opt.kernel;
  InclinedRun run{{}, build_model(build_structured_quad_mesh(dom, opt.nx, opt.ny), crack, opt.material, mo), {}};
  const Model& model = run.model;
  BoundaryConditions bcs;
  DirichletCondition rollers;
  rollers.tags = {"bottom"};
  rollers.components = {false, true};
  rollers.value = [](const Vec2&, Side) { return Vec2(0.0, 0.0); };
  bcs.dirichlet.push_back(rollers);
  TractionCondition top;
  top.tags = {"top"};
  const double st = opt.traction;
  top.traction = [st](const Vec2&, Side) { return Vec2(0.0, st); };
  bcs.traction.push_back(top);
  bcs.points.push_back({0, 0, 0.0});  // vertex 0 is the bottom-left corner: removes the x translation

  SparseMatrix K = assemble(model);
  LinearSystem sys = apply_bcs(model, K, bcs);
  RunResult& r = run.result;
  run.u = solve(sys, &r.stats);
  r.label = "inclined";
  r.n = opt.nx;
  r.h = model.h_max;
  r.n_dofs = model.dofs.size;
  r.n_enriched = model.plan.num_enriched_nodes();
  r.energy = strain_energy(model, run.u);
  SifResult s = extract_sifs(model, run.u, opt.sif_radius);
  r.K_I = s.K_I;
  r.K_II = s.K_II;
  r.wall_time = seconds_since(t0);
  return run;
}

ConvergenceStudy run_inclined_convergence(const InclinedOptions& base, const std::vector<double>& hs, double reference_h) {
  auto sized = [&base](double h) {
    InclinedOptions o = base;
    o.nx = static_cast<int>(std::lround(base.width / h));
    o.ny = static_cast<int>(std::lround(base.height / h));
    if (o.nx < 1 || o.ny < 1) throw std::invalid_argument("inclined convergence: mesh size larger than the plate");
    return o;
  };
  const double ref = run_inclined(sized(reference_h)).result.energy;
  ConvergenceStudy st;
  std::vector<double> h, e;
  for (double hv : hs) {
    RunResult r = run_inclined(sized(hv)).result;
    r.exact_energy = ref;
    r.rel_error = std::abs(r.energy - ref) / ref;
    st.rows.push_back(r);
    h.push_back(r.h);
    e.push_back(r.rel_error);
  }
  if (hs.size() >= 2) st.slope = fit_slope(h, e);
  return st;
}

}  // namespace xvem
