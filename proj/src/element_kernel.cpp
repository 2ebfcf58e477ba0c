#include "xvem/element_kernel.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "xvem/mesh.hpp"

namespace xvem {

StabilizationScheme parse_stabilization(const std::string& s) {
  if (s == "dofi") return StabilizationScheme::dofi;
  if (s == "drecipe") return StabilizationScheme::drecipe;
  throw std::invalid_argument("stabilization scheme must be \"dofi\" or \"drecipe\"");
}

KernelGeometry plain_kernel_geometry(const std::vector<Vec2>& loop, Side side) {
  KernelGeometry geo;
  auto g = polygon_geometry(loop);
  geo.dof_vertices = loop;
  geo.vertex_side.assign(loop.size(), side);
  geo.centroid = g.centroid;
  geo.diameter = g.diameter;
  geo.area = g.area;
  geo.side = side;
  const int n = static_cast<int>(loop.size());
  for (int k = 0; k < n; ++k) geo.pieces.push_back({loop[k], loop[(k + 1) % n], g.normals[k], side, k, nullptr});
  return geo;
}

std::vector<int> reduced_indices(int n_vertices, int basis_size, const std::vector<int>& enriched_vertices) {
  std::vector<int> r;
  for (int i = 0; i < 2 * n_vertices; ++i) r.push_back(i);
  if (basis_size == 8) {
    for (int v : enriched_vertices) r.push_back(2 * n_vertices + v);
    for (int v : enriched_vertices) r.push_back(3 * n_vertices + v);
  }
  return r;
}

void piece_hats(const KernelGeometry& geo, const TracePiece& piece, const Vec2& x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (piece.parent_edge >= 0) {
    const int n = static_cast<int>(geo.dof_vertices.size());
    const int k = piece.parent_edge, k1 = (k + 1) % n;
    const Vec2& va = geo.dof_vertices[k];
    const Vec2 e = geo.dof_vertices[k1] - va;
    double lam = (x - va).dot(e) / e.squaredNorm();
    out[k] = 1.0 - lam;
    out[k1] = lam;
  } else {
    if (!piece.trace) throw KernelFailure("crack piece without a trace model");
    piece.trace->eval(x, out);
  }
}

Matrix compute_D(const KernelGeometry& geo, const ExtendedBasis& basis) {
  const int N = static_cast<int>(geo.dof_vertices.size());
  const int nb = basis.size();
  Matrix D = Matrix::Zero(full_dof_count(N, nb), nb);
  for (int j = 0; j < N; ++j) {
    auto s = basis.eval(geo.dof_vertices[j], geo.vertex_side[j], false);
    for (int a = 0; a < 6; ++a) {
      D(2 * j, a) = s.value[a].x();
      D(2 * j + 1, a) = s.value[a].y();
    }
  }
  if (nb == 8)
    for (int j = 0; j < N; ++j) {
      D(2 * N + j, 6) = 1.0;
      D(3 * N + j, 7) = 1.0;
    }
  return D;
}

void compute_GB_boundary(const KernelGeometry& geo, const ExtendedBasis& basis, const Eigen::Matrix3d& C,
                         const KernelOptions& opt, const std::optional<Vec2>& singular_point, Matrix& G_tilde,
                         Matrix& B_tilde) {
  const int N = static_cast<int>(geo.dof_vertices.size());
  const int nb = basis.size();
  const int nd = full_dof_count(N, nb);
  G_tilde = Matrix::Zero(nb, nb);
  B_tilde = Matrix::Zero(nb, nd);
  const EdgeRule rule = gauss_legendre(opt.edge_order);
  std::vector<double> hats(N);
  std::array<Vec2, 8> t;
  for (const auto& piece : geo.pieces) {
    const double L = (piece.b - piece.a).norm();
    if (L <= 1e-15 * geo.diameter) continue;
    for (const auto& q : edge_points(piece.a, piece.b, rule, singular_point, opt.graded_ratio)) {
      auto s = basis.eval(q.x, piece.side, true);
      for (int b = 3; b < nb; ++b) {
        t[b] = stress_from_gradient(C, s.grad[b]) * piece.normal;
        if (!t[b].allFinite() || !s.value[b].allFinite()) {
          std::ostringstream os;
          os << "non-finite integrand at (" << q.x.x() << ", " << q.x.y() << ")";
          throw IntegrationFailure(os.str());
        }
      }
      piece_hats(geo, piece, q.x, hats);
      for (int b = 3; b < nb; ++b) {
        for (int a = 0; a < nb; ++a) G_tilde(b, a) += q.w * t[b].dot(s.value[a]);
        for (int i = 0; i < N; ++i) {
          if (hats[i] == 0.0) continue;
          const double wh = q.w * hats[i];
          B_tilde(b, 2 * i) += wh * t[b].x();
          B_tilde(b, 2 * i + 1) += wh * t[b].y();
          if (nb == 8) {
            B_tilde(b, 2 * N + i) += wh * t[b].dot(s.value[6]);
            B_tilde(b, 3 * N + i) += wh * t[b].dot(s.value[7]);
          }
        }
      }
    }
  }
}

void repair_rank(const KernelGeometry& geo, const ExtendedBasis& basis, const Matrix& G_tilde,
                 const Matrix& B_tilde, Matrix& G, Matrix& B) {
  const int N = static_cast<int>(geo.dof_vertices.size());
  const int nb = basis.size();
  G = G_tilde;
  B = B_tilde;
  G.topRows(3).setZero();
  B.topRows(3).setZero();
  const double inv = 1.0 / N;
  for (int j = 0; j < N; ++j) {
    auto s = basis.eval(geo.dof_vertices[j], geo.vertex_side[j], false);
    const Vec2& r = s.value[2];
    for (int a = 0; a < nb; ++a) {
      G(0, a) += inv * s.value[a].x();
      G(1, a) += inv * s.value[a].y();
      G(2, a) += inv * r.dot(s.value[a]);
    }
    B(0, 2 * j) += inv;
    B(1, 2 * j + 1) += inv;
    B(2, 2 * j) += inv * r.x();
    B(2, 2 * j + 1) += inv * r.y();
    if (nb == 8) {
      for (int k = 0; k < 2; ++k) {
        const Vec2& e = s.value[6 + k];
        const int col = (2 + k) * N + j;
        B(0, col) += inv * e.x();
        B(1, col) += inv * e.y();
        B(2, col) += inv * r.dot(e);
      }
    }
  }
}

Matrix compute_projector(const Matrix& G, const Matrix& B, double max_condition, double* condition) {
  // row equilibration: tiny Hansbo sub-polygons scale the energy rows by their area
  Vector sc(G.rows());
  for (int i = 0; i < G.rows(); ++i) {
    const double m = G.row(i).cwiseAbs().maxCoeff();
    sc(i) = m > 0.0 ? 1.0 / m : 1.0;
  }
  const Matrix Gs = sc.asDiagonal() * G;
  Eigen::JacobiSVD<Matrix> svd(Gs);
  const auto& sv = svd.singularValues();
  double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << "projector matrix is ill-conditioned (cond = " << cond << ")";
    throw KernelFailure(os.str());
  }
  return Gs.partialPivLu().solve(sc.asDiagonal() * B);
}

Matrix consistency_stiffness(const Matrix& Pi, const Matrix& G_tilde) {
  Matrix Gs = 0.5 * (G_tilde + G_tilde.transpose());
  Matrix K = Pi.transpose() * Gs * Pi;
  return 0.5 * (K + K.transpose());
}

// Vertex values of every basis function: 2N rows (x, y per vertex) by n_dof columns.
Matrix enrichment_value_matrix(const KernelGeometry& geo, const ExtendedBasis& basis) {
  const int N = static_cast<int>(geo.dof_vertices.size());
  const int nb = basis.size();
  const int nd = full_dof_count(N, nb);
  Matrix J = Matrix::Zero(2 * N, nd);
  J.leftCols(2 * N).setIdentity();
  if (nb == 8)
    for (int j = 0; j < N; ++j) {
      auto s = basis.eval(geo.dof_vertices[j], geo.vertex_side[j], false);
      for (int c = 0; c < 2; ++c) {
        J(2 * j + c, 2 * N + j) = s.value[6][c];
        J(2 * j + c, 3 * N + j) = s.value[7][c];
      }
    }
  return J;
}

Matrix stabilization(const Matrix& Kc, const Matrix& J, const Matrix& D, const Matrix& Pi,
                     const Eigen::Matrix3d& C, double hP, const KernelOptions& opt, double* tau) {
  if (!(opt.alpha > 0.0)) throw std::invalid_argument("stabilization: alpha must be positive");
  const int nd = static_cast<int>(Kc.rows());
  const Matrix R = J - (J * D) * Pi;
  Matrix Ks;
  if (opt.scheme == StabilizationScheme::dofi) {
    const double t = opt.alpha * Kc.trace() / nd;
    if (tau) *tau = t;
    Ks = t * (R.transpose() * R);
  } else {
    const int nr = static_cast<int>(R.rows());
    Vector S(nr);
    const double floor = C.trace() / 3.0 * hP;
    for (int i = 0; i < nr; ++i) S(i) = opt.alpha * std::max(floor, Kc(i, i));
    if (tau) *tau = S.mean();
    Ks = R.transpose() * S.asDiagonal() * R;
  }
  return 0.5 * (Ks + Ks.transpose());
}

Matrix restrict_partial(const Matrix& K, const std::vector<int>& reduced) {
  const int n = static_cast<int>(reduced.size());
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = K(reduced[i], reduced[j]);
  return out;
}

ElementKernel compute_element_kernel(const KernelGeometry& geo, int basis_size, const std::vector<int>& enriched_vertices,
                                     const Material& mat, const EnrichmentField* enrichment, const KernelOptions& opt) {
  if (!(opt.alpha > 0.0)) throw std::invalid_argument("stabilization: alpha must be positive");
  ExtendedBasis basis(geo.centroid, geo.diameter, basis_size, enrichment);
  const Eigen::Matrix3d C = elasticity_tensor(mat);
  ElementKernel k;
  k.basis_size = basis_size;
  k.n_vertices = static_cast<int>(geo.dof_vertices.size());
  k.n_full = full_dof_count(k.n_vertices, basis_size);
  std::optional<Vec2> singular;
  if (basis_size == 8) singular = enrichment->crack().tip();
  ProjectionData& p = k.proj;
  p.D = compute_D(geo, basis);
  compute_GB_boundary(geo, basis, C, opt, singular, p.G_tilde, p.B_tilde);
  repair_rank(geo, basis, p.G_tilde, p.B_tilde, p.G, p.B);
  p.Pi = compute_projector(p.G, p.B, opt.max_condition, &p.condition);
  k.Kc = consistency_stiffness(p.Pi, p.G_tilde);
  k.J = enrichment_value_matrix(geo, basis);
  k.Ks = stabilization(k.Kc, k.J, p.D, p.Pi, C, geo.diameter, opt, &k.tau);
  if (opt.keep_diagnostics) k.D_hat = k.J * p.D;
  k.reduced = reduced_indices(k.n_vertices, basis_size, enriched_vertices);
  k.Kc_reduced = restrict_partial(k.Kc, k.reduced);
  k.K_reduced = k.Kc_reduced + restrict_partial(k.Ks, k.reduced);
  if (!opt.keep_diagnostics) {
    p.D.resize(0, 0);
    p.G.resize(0, 0);
    p.B.resize(0, 0);
    p.B_tilde.resize(0, 0);
    k.J.resize(0, 0);
    k.Ks.resize(0, 0);
  }
  return k;
}

}  // namespace xvem
