#include "xvem/system.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <atomic>
#include <cstdio>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace xvem {

DofMap build_dof_map(const PolygonalMesh& mesh, const EnrichmentPlan& plan) {
  DofMap m;
  const int nv = mesh.num_vertices();
  m.base.assign(nv, {-1, -1});
  m.enriched = plan.node_enriched;
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    const int per = plan.node_enriched[v] ? 4 : 2;
    m.base[v][0] = next;
    next += per;
    if (plan.node_doubled[v]) {
      m.base[v][1] = next;
      next += per;
    }
  }
  m.size = next;
  return m;
}

namespace {

template <class F>
void parallel_for(int n, F&& f) {
  const int nt = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  if (nt == 1 || n < 64) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

KernelBlock make_block(const Model& model, int e, Side side, KernelGeometry geo, ElementKernel kernel) {
  KernelBlock b;
  b.element = e;
  b.side = side;
  const auto& loop = model.mesh.elements[e];
  const int N = static_cast<int>(loop.size());
  b.full_to_global.assign(kernel.n_full, -1);
  for (int j = 0; j < N; ++j) {
    const int v = loop[j];
    const int copy = model.copy_of(v, side);
    b.full_to_global[2 * j] = model.dofs.std_dof(v, copy, 0);
    b.full_to_global[2 * j + 1] = model.dofs.std_dof(v, copy, 1);
  }
  for (int idx : kernel.reduced) {
    if (idx < 2 * N) continue;
    const int mode = idx < 3 * N ? 0 : 1;
    const int j = idx - (2 + mode) * N;
    const int v = loop[j];
    if (!model.dofs.enriched[v]) throw std::logic_error("retained enriched DOF on a plain node");
    b.full_to_global[idx] = model.dofs.enr_dof(v, model.copy_of(v, side), mode);
  }
  for (int idx : kernel.reduced) b.dofs.push_back(b.full_to_global[idx]);
  b.geometry = std::move(geo);
  b.kernel = std::move(kernel);
  return b;
}

}  // namespace

Model build_model(PolygonalMesh mesh, std::optional<Crack> crack, const Material& material,
                  const ModelOptions& options) {
  material.validate();
  if (!(options.kernel.alpha > 0.0)) throw std::invalid_argument("stabilization: alpha must be positive");
  Model model;
  model.mesh = std::move(mesh);
  model.material = material;
  model.options = options;
  model.h_max = model.mesh.max_diameter();
  if (crack) {
    model.crack = std::make_unique<Crack>(*crack);
    model.plan = classify_elements(model.mesh, *model.crack, options.enrichment, options.enrichment_radius);
    model.enrichment = std::make_unique<EnrichmentField>(*model.crack, material, model.h_max);
  } else {
    if (options.enrichment != EnrichmentMode::none) throw std::invalid_argument("enrichment requires a crack");
    model.plan = empty_plan(model.mesh);
  }
  model.dofs = build_dof_map(model.mesh, model.plan);

  const int ne = model.mesh.num_elements();
  std::vector<std::vector<KernelBlock>> per_element(ne);
  const Model& cm = model;
  parallel_for(ne, [&](int e) {
    const auto& loop_ids = cm.mesh.elements[e];
    const auto loop = cm.mesh.element_loop(e);
    std::vector<int> ev;
    for (std::size_t j = 0; j < loop_ids.size(); ++j)
      if (cm.plan.node_enriched[loop_ids[j]]) ev.push_back(static_cast<int>(j));
    const int nb = ev.empty() ? 6 : 8;
    const EnrichmentField* enr = cm.enrichment.get();
    const auto& opt = cm.options.kernel;
    switch (cm.plan.element_class[e]) {
      case ElementClass::uncut: {
        auto geo = plain_kernel_geometry(loop, cm.plan.element_side[e]);
        auto k = compute_element_kernel(geo, nb, ev, cm.material, enr, opt);
        per_element[e].push_back(make_block(cm, e, cm.plan.element_side[e], std::move(geo), std::move(k)));
        break;
      }
      case ElementClass::cut: {
        auto ck = build_cut_kernel(loop, *cm.crack, nb, ev, cm.material, enr, opt, cm.plan.tip_interior);
        per_element[e].push_back(make_block(cm, e, Side::plus, std::move(ck.geo_plus), std::move(ck.plus)));
        per_element[e].push_back(make_block(cm, e, Side::minus, std::move(ck.geo_minus), std::move(ck.minus)));
        break;
      }
      case ElementClass::tip: {
        auto tk = build_tip_kernel(loop, *cm.crack, nb, ev, cm.material, enr, opt);
        per_element[e].push_back(make_block(cm, e, Side::plus, std::move(tk.geo), std::move(tk.kernel)));
        break;
      }
    }
  });
  model.element_blocks.assign(ne, {});
  for (int e = 0; e < ne; ++e)
    for (auto& b : per_element[e]) {
      model.element_blocks[e].push_back(static_cast<int>(model.blocks.size()));
      model.blocks.push_back(std::move(b));
    }
  return model;
}

namespace {

SparseMatrix assemble_with(const Model& model, bool consistency_only) {
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& b : model.blocks) {
    const Matrix& K = consistency_only ? b.kernel.Kc_reduced : b.kernel.K_reduced;
    const int n = static_cast<int>(b.dofs.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (K(i, j) != 0.0) trip.emplace_back(b.dofs[i], b.dofs[j], K(i, j));
  }
  SparseMatrix K(model.dofs.size, model.dofs.size);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

}  // namespace

SparseMatrix assemble(const Model& model) { return assemble_with(model, false); }
SparseMatrix assemble_consistency(const Model& model) { return assemble_with(model, true); }

LinearSystem apply_bcs(const Model& model, const SparseMatrix& K, const BoundaryConditions& bcs) {
  std::set<std::string> dtags, ttags;
  for (const auto& d : bcs.dirichlet) dtags.insert(d.tags.begin(), d.tags.end());
  for (const auto& t : bcs.traction) ttags.insert(t.tags.begin(), t.tags.end());
  for (const auto& t : ttags)
    if (dtags.count(t)) throw std::invalid_argument("boundary tag " + t + " is both essential and natural");

  const int n = model.dofs.size;
  LinearSystem sys;
  sys.constrained.assign(n, false);
  sys.prescribed = Vector::Zero(n);
  sys.load = Vector::Zero(n);
  const auto& mesh = model.mesh;
  const EdgeRule rule = gauss_legendre(model.options.kernel.edge_order);

  auto enrichment_at = [&](const Vec2& x, Side side) {
    return model.enrichment->eval(x, side, false).value;
  };

  for (const auto& be : mesh.boundary_edges) {
    const auto& loop = mesh.elements[be.element];
    const int N = static_cast<int>(loop.size());
    const int k = be.local_edge, k1 = (k + 1) % N;
    for (const auto& d : bcs.dirichlet) {
      if (!d.tags.count(be.tag)) continue;
      for (int bi : model.element_blocks[be.element]) {
        const auto& b = model.blocks[bi];
        for (int j : {k, k1}) {
          const Vec2& x = mesh.vertices[loop[j]];
          const Side s = b.geometry.vertex_side[j];
          Vec2 g = d.value(x, s);
          const int ei = 2 * N + j, eii = 3 * N + j;
          const bool has_enr = b.kernel.basis_size == 8 && b.full_to_global[ei] >= 0;
          Vec2 std_val = g;
          if (has_enr && d.components[0] && d.components[1]) {
            std::array<double, 2> amp{0.0, 0.0};
            if (d.enrichment_amplitude) amp = *d.enrichment_amplitude;
            auto psi = enrichment_at(x, s);
            std_val = g - amp[0] * psi[0] - amp[1] * psi[1];
            for (int m = 0; m < 2; ++m) {
              int gd = b.full_to_global[m == 0 ? ei : eii];
              sys.constrained[gd] = true;
              sys.prescribed(gd) = amp[m];
            }
          }
          for (int c = 0; c < 2; ++c) {
            if (!d.components[c]) continue;
            int gd = b.full_to_global[2 * j + c];
            sys.constrained[gd] = true;
            sys.prescribed(gd) = std_val(c);
          }
        }
      }
    }
    for (const auto& t : bcs.traction) {
      if (!t.tags.count(be.tag)) continue;
      for (int bi : model.element_blocks[be.element]) {
        const auto& b = model.blocks[bi];
        std::optional<Vec2> singular;
        if (b.kernel.basis_size == 8) singular = model.crack->tip();
        for (const auto& piece : b.geometry.pieces) {
          if (piece.parent_edge != k) continue;
          const Vec2& va = mesh.vertices[loop[k]];
          const Vec2 e = mesh.vertices[loop[k1]] - va;
          for (const auto& q : edge_points(piece.a, piece.b, rule, singular, model.options.kernel.graded_ratio)) {
            Vec2 tr = t.traction(q.x, piece.side);
            double lam = (q.x - va).dot(e) / e.squaredNorm();
            std::array<double, 2> hat{1.0 - lam, lam};
            std::array<int, 2> js{k, k1};
            std::array<Vec2, 2> psi;
            if (b.kernel.basis_size == 8) psi = model.enrichment->eval(q.x, piece.side, false).value;
            for (int a = 0; a < 2; ++a) {
              const int j = js[a];
              for (int c = 0; c < 2; ++c) sys.load(b.full_to_global[2 * j + c]) += q.w * hat[a] * tr(c);
              if (b.kernel.basis_size != 8) continue;
              for (int m = 0; m < 2; ++m) {
                int gd = b.full_to_global[(2 + m) * N + j];
                if (gd >= 0) sys.load(gd) += q.w * hat[a] * tr.dot(psi[m]);
              }
            }
          }
        }
      }
    }
  }
  for (const auto& p : bcs.points) {
    for (int c = 0; c < model.dofs.copies(p.vertex); ++c) {
      int gd = model.dofs.std_dof(p.vertex, c, p.component);
      sys.constrained[gd] = true;
      sys.prescribed(gd) = p.value;
    }
  }

  std::vector<int> g2f(n, -1);
  for (int i = 0; i < n; ++i)
    if (!sys.constrained[i]) {
      g2f[i] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(i);
    }
  const int nf = static_cast<int>(sys.free_dofs.size());
  sys.f_f = Vector::Zero(nf);
  for (int i = 0; i < nf; ++i) sys.f_f(i) = sys.load(sys.free_dofs[i]);
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (g2f[r] < 0) continue;
      if (g2f[c] >= 0)
        trip.emplace_back(g2f[r], g2f[c], it.value());
      else
        sys.f_f(g2f[r]) -= it.value() * sys.prescribed(c);
    }
  sys.K_ff.resize(nf, nf);
  sys.K_ff.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

namespace {
std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace

Vector solve_sparse(const SparseMatrix& A, const Vector& b, SolveStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  SolveStats st;
  st.n = static_cast<int>(A.rows());
  st.nnz = A.nonZeros();
  Vector x;
  bool ok = false;
  const double bnorm = b.norm();
  double anorm = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
    anorm = std::max(anorm, col);
  }
  // normwise backward error; geometric enrichment makes K poorly conditioned
  auto residual = [&](const Vector& y) {
    return (A * y - b).norm() / std::max(anorm * y.norm() + bnorm, 1e-300);
  };
  const double tol = 1e-12;
  {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
      const Vector& d = ldlt.vectorD();
      const double dmax = d.cwiseAbs().maxCoeff();
      const double dmin = d.cwiseAbs().minCoeff();
      if (d.allFinite() && dmin > 1e-14 * dmax) {
        x = ldlt.solve(b);
        for (int it = 0; it < 2 && x.allFinite() && residual(x) > 1e-15; ++it) x += ldlt.solve(b - A * x);
        st.method = (d.array() > 0.0).all() ? "sparse-cholesky-ldlt" : "sparse-ldlt-indefinite";
        ok = x.allFinite();
      } else {
        throw SingularSystem("stiffness matrix is singular (check essential boundary conditions)");
      }
    }
  }
  if (!ok || (bnorm > 0.0 && residual(x) > tol)) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularSystem("sparse factorization failed: singular system");
    x = lu.solve(b);
    for (int it = 0; it < 2 && x.allFinite() && residual(x) > 1e-15; ++it) x += lu.solve(b - A * x);
    st.method = "sparse-lu";
  }
  st.residual = bnorm > 0.0 ? residual(x) : 0.0;
  if (!x.allFinite() || st.residual > tol)
    throw SolverFailure("linear solve backward error too large (" + fmt_sci(st.residual) + ", " + st.method + ")");
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return x;
}

Vector solve(const LinearSystem& sys, SolveStats* stats) {
  Vector u = sys.prescribed;
  if (sys.free_dofs.empty()) return u;
  Vector uf = solve_sparse(sys.K_ff, sys.f_f, stats);
  for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) u(sys.free_dofs[i]) = uf(i);
  return u;
}

Vector block_coefficients(const Model&, const KernelBlock& block, const Vector& u) {
  Vector full = Vector::Zero(block.kernel.n_full);
  for (std::size_t i = 0; i < block.dofs.size(); ++i) full(block.kernel.reduced[i]) = u(block.dofs[i]);
  return block.kernel.proj.Pi * full;
}

Mat2 block_gradient(const Model& model, const KernelBlock& block, const Vector& coeffs, const Vec2& x, Side side) {
  ExtendedBasis basis(block.geometry.centroid, block.geometry.diameter, block.kernel.basis_size,
                      model.enrichment.get());
  auto s = basis.eval(x, side, true);
  Mat2 g = Mat2::Zero();
  for (int a = 0; a < basis.size(); ++a) g += coeffs(a) * s.grad[a];
  return g;
}

double strain_energy(const Model& model, const Vector& u) {
  double e = 0.0;
  for (const auto& b : model.blocks) {
    const int n = static_cast<int>(b.dofs.size());
    Vector ub(n);
    for (int i = 0; i < n; ++i) ub(i) = u(b.dofs[i]);
    e += 0.5 * ub.dot(b.kernel.Kc_reduced * ub);
  }
  return e;
}

std::vector<Vec2> nodal_displacements(const Model& model, const Vector& u) {
  std::vector<Vec2> out(model.mesh.num_vertices());
  for (int v = 0; v < model.mesh.num_vertices(); ++v) {
    Vec2 d(u(model.dofs.std_dof(v, 0, 0)), u(model.dofs.std_dof(v, 0, 1)));
    if (model.dofs.enriched[v]) {
      auto psi = model.enrichment->eval(model.mesh.vertices[v], Side::plus, false).value;
      d += u(model.dofs.enr_dof(v, 0, 0)) * psi[0] + u(model.dofs.enr_dof(v, 0, 1)) * psi[1];
    }
    out[v] = d;
  }
  return out;
}

}  // namespace xvem
