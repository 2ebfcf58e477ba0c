#pragma once

#include <memory>
#include <vector>

#include "xvem/crack.hpp"
#include "xvem/element_kernel.hpp"

namespace xvem {

// First-order polyharmonic spline s(x) = sum_k w_k |x - x_k| + c0 + c1 x + c2 y, one
// column of weights per interpolated function.
class PolyharmonicTrace : public CrackTrace {
 public:
  PolyharmonicTrace(std::vector<Vec2> nodes, const Matrix& values);
  int size() const override { return static_cast<int>(weights_.cols()); }
  void eval(const Vec2& x, std::span<double> out) const override;
  const std::vector<Vec2>& nodes() const { return nodes_; }

 private:
  std::vector<Vec2> nodes_;
  Vec2 center_;
  double scale_;
  Matrix weights_;  // m x n
  Matrix tail_;     // 3 x n
};

// Nodes are the parent boundary vertices plus crack/boundary intersection points; values(k, i)
// is the trace of hat i at node k. Throws TraceFailure for a singular system.
std::shared_ptr<PolyharmonicTrace> build_trace_model(const std::vector<Vec2>& nodes, const Matrix& values);

// Hat traces of a polygon at points on its boundary, as interpolation data.
std::shared_ptr<PolyharmonicTrace> hat_trace_model(const std::vector<Vec2>& loop, const std::vector<Vec2>& extra_points);

KernelGeometry cut_kernel_geometry(const std::vector<Vec2>& loop, const SplitElement& split, Side side,
                                   std::shared_ptr<const CrackTrace> trace);
KernelGeometry tip_kernel_geometry(const std::vector<Vec2>& loop, const TipSlit& slit, const Crack& crack,
                                   std::shared_ptr<const CrackTrace> trace);

struct CutKernel {
  SplitElement split;
  KernelGeometry geo_plus, geo_minus;
  ElementKernel plus, minus;
  Matrix K;  // blockdiag(plus, minus) of the retained DOFs
  const ElementKernel& block(Side s) const { return s == Side::plus ? plus : minus; }
  const KernelGeometry& geometry(Side s) const { return s == Side::plus ? geo_plus : geo_minus; }
};

CutKernel build_cut_kernel(const std::vector<Vec2>& loop, const Crack& crack, int basis_size,
                           const std::vector<int>& enriched_vertices, const Material& mat,
                           const EnrichmentField* enrichment, const KernelOptions& opt,
                           bool tip_interior = true);

struct TipKernel {
  TipSlit slit;
  KernelGeometry geo;
  ElementKernel kernel;
};

TipKernel build_tip_kernel(const std::vector<Vec2>& loop, const Crack& crack, int basis_size,
                           const std::vector<int>& enriched_vertices, const Material& mat,
                           const EnrichmentField* enrichment, const KernelOptions& opt);

// Eigenvalues below rel_tol times the largest one.
int count_zero_modes(const Matrix& K, double rel_tol = 1e-10);

}  // namespace xvem
