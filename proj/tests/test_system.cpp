#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <sstream>

#include "xvem/experiments.hpp"
#include "xvem/vtk.hpp"

using namespace xvem;

namespace {

Model plain_model(int n, const Material& mat = {}) {
  auto mesh = build_structured_quad_mesh({0, 0, 1, 1}, n, n);
  return build_model(mesh, std::nullopt, mat, {});
}

Model cracked_model(int n, EnrichmentMode mode, double radius = 0.5) {
  ModelOptions mo;
  mo.enrichment = mode;
  mo.enrichment_radius = radius;
  return build_model(benchmark_mesh(MeshKind::quad, n), benchmark_crack(), Material{}, mo);
}

}  // namespace

TEST(System, DofMapLayout) {
  auto m = cracked_model(4, EnrichmentMode::topological);
  int expected = 0;
  for (int v = 0; v < m.mesh.num_vertices(); ++v) {
    const int per = m.plan.node_enriched[v] ? 4 : 2;
    expected += per * m.dofs.copies(v);
    EXPECT_EQ(m.dofs.copies(v), m.plan.node_doubled[v] ? 2 : 1);
    if (m.dofs.enriched[v]) EXPECT_EQ(m.dofs.enr_dof(v, 0, 0), m.dofs.std_dof(v, 0, 0) + 2);
  }
  EXPECT_EQ(m.dofs.size, expected);
  // nodes strictly behind the tip on the crack line are doubled
  int doubled = 0;
  for (int v = 0; v < m.mesh.num_vertices(); ++v) doubled += m.plan.node_doubled[v];
  EXPECT_EQ(doubled, 2);
}

TEST(System, UncrackedStiffnessHasRigidKernel) {
  auto m = plain_model(3);
  Matrix K = Matrix(assemble(m));
  EXPECT_LT((K - K.transpose()).norm(), 1e-12 * K.norm());
  Eigen::SelfAdjointEigenSolver<Matrix> es(K, Eigen::EigenvaluesOnly);
  int zeros = 0;
  for (int i = 0; i < K.rows(); ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-10 * es.eigenvalues().maxCoeff();
  EXPECT_EQ(zeros, 3);
  EXPECT_GT(es.eigenvalues()(0), -1e-10 * es.eigenvalues().maxCoeff());
}

TEST(System, CrackedStiffnessDecouplesFaces) {
  auto m = cracked_model(4, EnrichmentMode::none);
  Matrix K = Matrix(assemble(m));
  EXPECT_LT((K - K.transpose()).norm(), 1e-12 * K.norm());
  // opening the crack faces rigidly costs no energy only for the whole body; a rigid
  // translation of the body is still a zero mode
  Vector t = Vector::Zero(m.dofs.size);
  for (int v = 0; v < m.mesh.num_vertices(); ++v)
    for (int c = 0; c < m.dofs.copies(v); ++c) t(m.dofs.std_dof(v, c, 0)) = 1.0;
  EXPECT_LT((K * t).norm(), 1e-10 * K.norm());
}

TEST(System, UniaxialTensionIsExact) {
  Material mat;
  mat.E = 200.0;
  mat.nu = 0.25;
  mat.plane = PlaneAssumption::stress;
  auto m = plain_model(5, mat);
  for (double load : {1.0, 2.0}) {
    BoundaryConditions bcs;
    DirichletCondition left;
    left.tags = {"left"};
    left.components = {true, false};
    left.value = [](const Vec2&, Side) { return Vec2::Zero(); };
    bcs.dirichlet.push_back(left);
    bcs.points.push_back({0, 1, 0.0});
    TractionCondition right;
    right.tags = {"right"};
    right.traction = [load](const Vec2&, Side) { return Vec2(load, 0.0); };
    bcs.traction.push_back(right);
    auto K = assemble(m);
    auto sys = apply_bcs(m, K, bcs);
    SolveStats st;
    Vector u = solve(sys, &st);
    EXPECT_LE(st.residual, 1e-12);
    for (int v = 0; v < m.mesh.num_vertices(); ++v) {
      const Vec2& x = m.mesh.vertices[v];
      EXPECT_NEAR(u(m.dofs.std_dof(v, 0, 0)), load / mat.E * x.x(), 1e-12 * load);
      EXPECT_NEAR(u(m.dofs.std_dof(v, 0, 1)), -mat.nu * load / mat.E * x.y(), 1e-12 * load);
    }
    const double energy = strain_energy(m, u);
    EXPECT_NEAR(energy, 0.5 * load * load / mat.E, 1e-12 * load * load);
    Vector Ku = K * u;
    EXPECT_NEAR(0.5 * u.dot(Ku), energy, 1e-12 * energy);
  }
}

TEST(System, LinearDirichletDataIsReproduced) {
  auto m = plain_model(4);
  BoundaryConditions bcs;
  DirichletCondition d;
  d.tags = {"bottom", "right", "top", "left"};
  d.value = [](const Vec2& x, Side) { return Vec2(0.1 + 0.2 * x.x() - 0.3 * x.y(), -0.2 + 0.4 * x.x() + 0.1 * x.y()); };
  bcs.dirichlet.push_back(d);
  Vector u = solve(apply_bcs(m, assemble(m), bcs));
  for (int v = 0; v < m.mesh.num_vertices(); ++v) {
    Vec2 ex = d.value(m.mesh.vertices[v], Side::plus);
    EXPECT_NEAR(u(m.dofs.std_dof(v, 0, 0)), ex.x(), 1e-12);
    EXPECT_NEAR(u(m.dofs.std_dof(v, 0, 1)), ex.y(), 1e-12);
  }
}

TEST(System, ZeroDataGivesZeroSolution) {
  auto m = cracked_model(6, EnrichmentMode::geometric);
  BoundaryConditions bcs;
  DirichletCondition d;
  d.tags = {"bottom", "right", "top", "left"};
  d.value = [](const Vec2&, Side) { return Vec2::Zero(); };
  bcs.dirichlet.push_back(d);
  Vector u = solve(apply_bcs(m, assemble(m), bcs));
  EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(strain_energy(m, u), 0.0);
}

TEST(System, SingularSystemIsReported) {
  auto m = plain_model(2);
  BoundaryConditions none;
  EXPECT_THROW(solve(apply_bcs(m, assemble(m), none)), SolverFailure);
}

TEST(System, ExtendedPatchTests) {
  auto q = run_extended_patch_test(MeshKind::quad);
  EXPECT_LE(q.rel_error, 1e-8);
  EXPECT_LE(q.max_dof_error, 1e-8);
  auto p = run_extended_patch_test(MeshKind::poly);
  EXPECT_LE(p.rel_error, 1e-6);
  EXPECT_EQ(p.n, 64);
}

TEST(System, DiscontinuousPatchTest) {
  auto r = run_discontinuous_patch_test();
  EXPECT_LE(r.rel_error, 1e-10);
  EXPECT_LE(r.max_dof_error, 1e-8);
  EXPECT_NEAR(r.exact_energy, 1.25, 1e-15);
}

TEST(System, GeometricBenchmarkIsAccurateOnCoarseMesh) {
  BenchmarkOptions o;
  o.n = 10;
  auto run = run_benchmark(o);
  EXPECT_LT(run.result.rel_error, 1e-2);
  EXPECT_NEAR(run.result.K_I, 1.0, 0.02);
  EXPECT_NEAR(run.result.K_II, 1.0, 0.02);
  o.enrichment = EnrichmentMode::none;
  auto vem = run_benchmark(o);
  EXPECT_GT(vem.result.rel_error, run.result.rel_error);
}

TEST(System, RelativeErrorIsModulusInvariant) {
  BenchmarkOptions o;
  o.n = 10;
  o.kernel.alpha = 0.01;
  o.material.E = 1e3;
  auto a = run_benchmark(o);
  o.material.E = 1e7;
  auto b = run_benchmark(o);
  EXPECT_NEAR(a.result.rel_error, b.result.rel_error, 1e-6 * a.result.rel_error);
}

TEST(System, VtkOutput) {
  auto run = run_benchmark(BenchmarkOptions{});
  std::string text = vtk_polydata(run.model, run.u);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# vtk DataFile Version 3.0");
  int doubled = 0;
  for (int v = 0; v < run.model.mesh.num_vertices(); ++v) doubled += run.model.dofs.copies(v) == 2;
  const int points = run.model.mesh.num_vertices() + doubled;
  EXPECT_NE(text.find("POINTS " + std::to_string(points) + " double"), std::string::npos);
  EXPECT_NE(text.find("POLYGONS " + std::to_string(run.model.mesh.num_elements())), std::string::npos);
  EXPECT_NE(text.find("POINT_DATA " + std::to_string(points)), std::string::npos);
  EXPECT_ANY_THROW(vtk_polydata(run.model, Vector::Zero(3)));
}
