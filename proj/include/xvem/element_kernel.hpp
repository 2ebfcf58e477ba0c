#pragma once

#include <memory>
#include <span>
#include <vector>

#include "xvem/common.hpp"
#include "xvem/material.hpp"
#include "xvem/quadrature.hpp"

namespace xvem {

// Values of the N_P scalar hat traces at points of a crack piece.
class CrackTrace {
 public:
  virtual ~CrackTrace() = default;
  virtual int size() const = 0;
  virtual void eval(const Vec2& x, std::span<double> out) const = 0;
};

// A straight piece of the integration boundary. On a parent edge k the hats of vertices k
// and k+1 are linear; elsewhere the traces come from a CrackTrace.
struct TracePiece {
  Vec2 a, b;
  Vec2 normal;  // outward
  Side side = Side::plus;
  int parent_edge = -1;
  const CrackTrace* trace = nullptr;
};

struct KernelGeometry {
  std::vector<Vec2> dof_vertices;  // parent vertices carrying the DOFs
  std::vector<Side> vertex_side;   // side used for enrichment values at the vertices
  std::vector<TracePiece> pieces;
  Vec2 centroid = Vec2::Zero();
  double diameter = 0.0;
  double area = 0.0;
  Side side = Side::plus;
  std::shared_ptr<const CrackTrace> trace_owner;  // keeps a spline alive with the geometry
};

KernelGeometry plain_kernel_geometry(const std::vector<Vec2>& loop, Side side);

enum class StabilizationScheme { dofi, drecipe };

StabilizationScheme parse_stabilization(const std::string& s);

struct KernelOptions {
  StabilizationScheme scheme = StabilizationScheme::dofi;
  double alpha = 1.0;
  int edge_order = 16;
  double graded_ratio = 0.5;
  double max_condition = 1e12;
  bool keep_diagnostics = true;
};

struct ProjectionData {
  Matrix D;        // n_dof x nb, DOFs of the basis
  Matrix G_tilde;  // nb x nb boundary form, rows 1-3 zero
  Matrix B_tilde;  // nb x n_dof
  Matrix G, B;     // after rank repair
  Matrix Pi;       // nb x n_dof
  double condition = 0.0;
};

struct ElementKernel {
  int basis_size = 6;
  int n_vertices = 0;
  int n_full = 0;
  double tau = 0.0;
  ProjectionData proj;
  Matrix Kc, Ks, D_hat;  // full size
  Matrix J;              // vertex values of the basis functions (2N x full size)
  std::vector<int> reduced;  // full index of each retained DOF
  Matrix K_reduced, Kc_reduced;
};

// Full-size DOF count: 2 N_P standard, then N_P mode-I, then N_P mode-II.
inline int full_dof_count(int n_vertices, int basis_size) {
  return basis_size == 8 ? 4 * n_vertices : 2 * n_vertices;
}

// Retained DOFs for a set of enriched local vertices.
std::vector<int> reduced_indices(int n_vertices, int basis_size, const std::vector<int>& enriched_vertices);

Matrix compute_D(const KernelGeometry& geo, const ExtendedBasis& basis);
void compute_GB_boundary(const KernelGeometry& geo, const ExtendedBasis& basis, const Eigen::Matrix3d& C,
                         const KernelOptions& opt, const std::optional<Vec2>& singular_point, Matrix& G_tilde,
                         Matrix& B_tilde);
void repair_rank(const KernelGeometry& geo, const ExtendedBasis& basis, const Matrix& G_tilde,
                 const Matrix& B_tilde, Matrix& G, Matrix& B);
Matrix compute_projector(const Matrix& G, const Matrix& B, double max_condition, double* condition = nullptr);
Matrix consistency_stiffness(const Matrix& Pi, const Matrix& G_tilde);
Matrix enrichment_value_matrix(const KernelGeometry& geo, const ExtendedBasis& basis);
Matrix stabilization(const Matrix& Kc, const Matrix& J, const Matrix& D, const Matrix& Pi,
                     const Eigen::Matrix3d& C, double hP, const KernelOptions& opt, double* tau = nullptr);
Matrix restrict_partial(const Matrix& K, const std::vector<int>& reduced);

ElementKernel compute_element_kernel(const KernelGeometry& geo, int basis_size, const std::vector<int>& enriched_vertices,
                                     const Material& mat, const EnrichmentField* enrichment, const KernelOptions& opt);

// Hat trace values of all vertices at a point of a piece.
void piece_hats(const KernelGeometry& geo, const TracePiece& piece, const Vec2& x, std::span<double> out);

}  // namespace xvem
