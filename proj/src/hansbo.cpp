#include "xvem/hansbo.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "xvem/mesh.hpp"

namespace xvem {

PolyharmonicTrace::PolyharmonicTrace(std::vector<Vec2> nodes, const Matrix& values) : nodes_(std::move(nodes)) {
  const int m = static_cast<int>(nodes_.size());
  if (m < 3) throw TraceFailure("trace model: need at least three nodes");
  if (values.rows() != m) throw std::invalid_argument("trace model: one data row per node");
  center_.setZero();
  for (const auto& p : nodes_) center_ += p;
  center_ /= m;
  scale_ = 0.0;
  for (const auto& p : nodes_) scale_ = std::max(scale_, (p - center_).norm());
  if (!(scale_ > 0.0)) throw TraceFailure("trace model: coincident nodes");
  Matrix A = Matrix::Zero(m + 3, m + 3);
  for (int i = 0; i < m; ++i) {
    Vec2 xi = (nodes_[i] - center_) / scale_;
    for (int j = 0; j < m; ++j) A(i, j) = ((nodes_[j] - center_) / scale_ - xi).norm();
    A(i, m) = A(m, i) = 1.0;
    A(i, m + 1) = A(m + 1, i) = xi.x();
    A(i, m + 2) = A(m + 2, i) = xi.y();
  }
  Eigen::FullPivLU<Matrix> lu(A);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw TraceFailure("trace model: singular interpolation system");
  Matrix rhs = Matrix::Zero(m + 3, values.cols());
  rhs.topRows(m) = values;
  Matrix sol = lu.solve(rhs);
  if (!sol.allFinite() || (A * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
    throw TraceFailure("trace model: singular interpolation system");
  weights_ = sol.topRows(m);
  tail_ = sol.bottomRows(3);
}

void PolyharmonicTrace::eval(const Vec2& x, std::span<double> out) const {
  const Vec2 xi = (x - center_) / scale_;
  const int m = static_cast<int>(nodes_.size());
  const int n = size();
  for (int i = 0; i < n; ++i) out[i] = tail_(0, i) + tail_(1, i) * xi.x() + tail_(2, i) * xi.y();
  for (int k = 0; k < m; ++k) {
    double r = ((nodes_[k] - center_) / scale_ - xi).norm();
    for (int i = 0; i < n; ++i) out[i] += weights_(k, i) * r;
  }
}

std::shared_ptr<PolyharmonicTrace> build_trace_model(const std::vector<Vec2>& nodes, const Matrix& values) {
  return std::make_shared<PolyharmonicTrace>(nodes, values);
}

std::shared_ptr<PolyharmonicTrace> hat_trace_model(const std::vector<Vec2>& loop, const std::vector<Vec2>& extra_points) {
  const int n = static_cast<int>(loop.size());
  double h = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) h = std::max(h, (loop[i] - loop[j]).norm());
  std::vector<Vec2> nodes = loop;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) {
    std::vector<double> r(n, 0.0);
    r[i] = 1.0;
    rows.push_back(r);
  }
  for (const auto& p : extra_points) {
    bool dup = false;
    for (const auto& q : nodes) dup = dup || (q - p).norm() <= 1e-10 * h;
    if (dup) continue;
    int best = -1;
    double bd = 1e300, bl = 0.0;
    for (int k = 0; k < n; ++k) {
      Vec2 e = loop[(k + 1) % n] - loop[k];
      double lam = std::clamp((p - loop[k]).dot(e) / e.squaredNorm(), 0.0, 1.0);
      double d = (loop[k] + lam * e - p).norm();
      if (d < bd) {
        bd = d;
        best = k;
        bl = lam;
      }
    }
    std::vector<double> r(n, 0.0);
    r[best] = 1.0 - bl;
    r[(best + 1) % n] = bl;
    nodes.push_back(p);
    rows.push_back(r);
  }
  Matrix values(nodes.size(), n);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < n; ++i) values(k, i) = rows[k][i];
  return build_trace_model(nodes, values);
}

namespace {

void fill_pieces(KernelGeometry& geo, const std::vector<SubVertex>& verts, const std::vector<int>& edge_parent,
                 const Crack& crack, const std::optional<Side>& fixed_side, const CrackTrace* trace) {
  const int m = static_cast<int>(verts.size());
  for (int k = 0; k < m; ++k) {
    const Vec2& a = verts[k].x;
    const Vec2& b = verts[(k + 1) % m].x;
    Vec2 d = b - a;
    double L = d.norm();
    if (L == 0.0) continue;
    const Vec2 normal(d.y() / L, -d.x() / L);
    const CrackTrace* tr = edge_parent[k] < 0 ? trace : nullptr;
    if (fixed_side) {
      geo.pieces.push_back({a, b, normal, *fixed_side, edge_parent[k], tr});
      continue;
    }
    // split where the edge crosses the crack line ahead of the tip, so each piece sees one branch
    const Vec2 la = crack.to_local(a), lb = crack.to_local(b);
    std::vector<Vec2> cuts = {a};
    if (la.y() * lb.y() < 0.0) {
      const double t = la.y() / (la.y() - lb.y());
      if (la.x() + t * (lb.x() - la.x()) > 0.0) cuts.push_back(a + t * d);
    }
    cuts.push_back(b);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const Vec2 mid = 0.5 * (cuts[i] + cuts[i + 1]);
      const Side s = crack.to_local(mid).y() >= 0.0 ? Side::plus : Side::minus;
      geo.pieces.push_back({cuts[i], cuts[i + 1], normal, s, edge_parent[k], tr});
    }
  }
}

}  // namespace

KernelGeometry cut_kernel_geometry(const std::vector<Vec2>& loop, const SplitElement& split, Side side,
                                   std::shared_ptr<const CrackTrace> trace) {
  const SubPolygon& sp = split.part(side);
  KernelGeometry geo;
  geo.dof_vertices = loop;
  geo.vertex_side.assign(loop.size(), side);
  auto g = polygon_geometry(sp.loop());
  geo.centroid = g.centroid;
  geo.diameter = g.diameter;
  geo.area = g.area;
  geo.side = side;
  geo.trace_owner = trace;
  const int m = static_cast<int>(sp.vertices.size());
  for (int k = 0; k < m; ++k) {
    const Vec2& a = sp.vertices[k].x;
    const Vec2& b = sp.vertices[(k + 1) % m].x;
    Vec2 d = b - a;
    double L = d.norm();
    if (L == 0.0) continue;
    int pe = sp.edge_parent[k];
    geo.pieces.push_back({a, b, Vec2(d.y(), -d.x()) / L, side, pe, pe < 0 ? trace.get() : nullptr});
  }
  return geo;
}

KernelGeometry tip_kernel_geometry(const std::vector<Vec2>& loop, const TipSlit& slit, const Crack& crack,
                                   std::shared_ptr<const CrackTrace> trace) {
  KernelGeometry geo;
  geo.dof_vertices = loop;
  for (const auto& v : loop)
    geo.vertex_side.push_back(signed_distance(crack, v) >= 0.0 ? Side::plus : Side::minus);
  auto g = polygon_geometry(loop);
  geo.centroid = g.centroid;
  geo.diameter = g.diameter;
  geo.area = g.area;
  geo.side = Side::plus;
  geo.trace_owner = trace;
  fill_pieces(geo, slit.loop, slit.edge_parent, crack, std::nullopt, trace.get());
  for (std::size_t k = 0; k + 1 < slit.path.size(); ++k) {
    const Vec2& a = slit.path[k];
    const Vec2& b = slit.path[k + 1];
    Vec2 n = perp((b - a).normalized());
    geo.pieces.push_back({a, b, -n, Side::plus, -1, trace.get()});
    geo.pieces.push_back({a, b, n, Side::minus, -1, trace.get()});
  }
  return geo;
}

CutKernel build_cut_kernel(const std::vector<Vec2>& loop, const Crack& crack, int basis_size,
                           const std::vector<int>& enriched_vertices, const Material& mat,
                           const EnrichmentField* enrichment, const KernelOptions& opt, bool tip_interior) {
  CutKernel ck;
  ck.split = split_polygon(loop, crack, tip_interior);
  auto trace = hat_trace_model(loop, {ck.split.crack_path.front(), ck.split.crack_path.back()});
  ck.geo_plus = cut_kernel_geometry(loop, ck.split, Side::plus, trace);
  ck.geo_minus = cut_kernel_geometry(loop, ck.split, Side::minus, trace);
  ck.plus = compute_element_kernel(ck.geo_plus, basis_size, enriched_vertices, mat, enrichment, opt);
  ck.minus = compute_element_kernel(ck.geo_minus, basis_size, enriched_vertices, mat, enrichment, opt);
  const int np = static_cast<int>(ck.plus.K_reduced.rows());
  const int nm = static_cast<int>(ck.minus.K_reduced.rows());
  ck.K = Matrix::Zero(np + nm, np + nm);
  ck.K.topLeftCorner(np, np) = ck.plus.K_reduced;
  ck.K.bottomRightCorner(nm, nm) = ck.minus.K_reduced;
  return ck;
}

TipKernel build_tip_kernel(const std::vector<Vec2>& loop, const Crack& crack, int basis_size,
                           const std::vector<int>& enriched_vertices, const Material& mat,
                           const EnrichmentField* enrichment, const KernelOptions& opt) {
  TipKernel tk;
  tk.slit = tip_slit(loop, crack);
  std::vector<Vec2> extra = {tk.slit.path.front()};
  const double h = polygon_geometry(loop).diameter;
  if (point_in_polygon(loop, tk.slit.path.back(), 1e-10 * h) == 0) extra.push_back(tk.slit.path.back());
  auto trace = hat_trace_model(loop, extra);
  tk.geo = tip_kernel_geometry(loop, tk.slit, crack, trace);
  tk.kernel = compute_element_kernel(tk.geo, basis_size, enriched_vertices, mat, enrichment, opt);
  return tk;
}

int count_zero_modes(const Matrix& K, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double top = ev.cwiseAbs().maxCoeff();
  int c = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) < rel_tol * top) ++c;
  return c;
}

}  // namespace xvem
