#pragma once

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xvem/crack.hpp"
#include "xvem/element_kernel.hpp"
#include "xvem/hansbo.hpp"
#include "xvem/material.hpp"
#include "xvem/mesh.hpp"

namespace xvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Global numbering: each node copy owns x, y and, when enriched, mode-I and mode-II DOFs.
struct DofMap {
  std::vector<std::array<int, 2>> base;  // first DOF of copy 0 / copy 1 (-1 if absent)
  std::vector<bool> enriched;
  int size = 0;

  int copies(int node) const { return base[node][1] >= 0 ? 2 : 1; }
  int std_dof(int node, int copy, int comp) const { return base[node][copy] + comp; }
  int enr_dof(int node, int copy, int mode) const { return base[node][copy] + 2 + mode; }
};

DofMap build_dof_map(const PolygonalMesh& mesh, const EnrichmentPlan& plan);

// One element kernel (or one Hansbo block) with its place in the global system.
struct KernelBlock {
  int element = -1;
  Side side = Side::plus;
  KernelGeometry geometry;
  ElementKernel kernel;
  std::vector<int> full_to_global;  // -1 for DOFs not retained
  std::vector<int> dofs;            // global DOF of each retained local DOF
};

struct ModelOptions {
  EnrichmentMode enrichment = EnrichmentMode::none;
  double enrichment_radius = 0.0;
  KernelOptions kernel;
};

struct Model {
  PolygonalMesh mesh;
  std::unique_ptr<Crack> crack;
  Material material;
  ModelOptions options;
  EnrichmentPlan plan;
  DofMap dofs;
  double h_max = 0.0;
  std::unique_ptr<EnrichmentField> enrichment;
  std::vector<KernelBlock> blocks;
  std::vector<std::vector<int>> element_blocks;

  int copy_of(int node, Side side) const {
    return plan.node_doubled[node] && side == Side::minus ? 1 : 0;
  }
};

Model build_model(PolygonalMesh mesh, std::optional<Crack> crack, const Material& material,
                  const ModelOptions& options);

SparseMatrix assemble(const Model& model);
SparseMatrix assemble_consistency(const Model& model);

// ---- boundary conditions ----

using VectorField = std::function<Vec2(const Vec2& x, Side side)>;

struct DirichletCondition {
  std::set<std::string> tags;
  VectorField value;
  std::array<bool, 2> components{true, true};
  // When the data is an enrichment field a_I psi_I + a_II psi_II (+ remainder), enriched
  // boundary DOFs take these amplitudes and standard DOFs the remainder.
  std::optional<std::array<double, 2>> enrichment_amplitude;
};

struct TractionCondition {
  std::set<std::string> tags;
  VectorField traction;
};

struct PointConstraint {
  int vertex;
  int component;
  double value = 0.0;
};

struct BoundaryConditions {
  std::vector<DirichletCondition> dirichlet;
  std::vector<TractionCondition> traction;
  std::vector<PointConstraint> points;
};

struct LinearSystem {
  SparseMatrix K_ff;
  Vector f_f;
  std::vector<int> free_dofs;
  std::vector<bool> constrained;
  Vector prescribed;  // full size
  Vector load;        // full size external load
};

LinearSystem apply_bcs(const Model& model, const SparseMatrix& K, const BoundaryConditions& bcs);

struct SolveStats {
  std::string method;
  int n = 0;
  long nnz = 0;
  double residual = 0.0;
  double seconds = 0.0;
};

// Sparse Cholesky with LDL^T and LU fallbacks; returns the full DOF vector.
Vector solve(const LinearSystem& sys, SolveStats* stats = nullptr);
Vector solve_sparse(const SparseMatrix& A, const Vector& b, SolveStats* stats = nullptr);

// 1/2 u^T K_c u over all blocks.
double strain_energy(const Model& model, const Vector& u);

// Projection coefficients of a block.
Vector block_coefficients(const Model& model, const KernelBlock& block, const Vector& u);

// Displacement gradient of the projected field of a block at x.
Mat2 block_gradient(const Model& model, const KernelBlock& block, const Vector& coeffs, const Vec2& x, Side side);

// Nodal displacement (standard plus enrichment part) of copy 0 of every node.
std::vector<Vec2> nodal_displacements(const Model& model, const Vector& u);

}  // namespace xvem
