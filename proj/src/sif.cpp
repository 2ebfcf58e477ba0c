#include "xvem/sif.hpp"

#include <cmath>

namespace xvem {

JDomain build_jdomain(const Model& model, double radius) {
  if (!model.crack) throw std::invalid_argument("J-domain needs a crack");
  if (!(radius > 0.0)) throw std::invalid_argument("J-domain radius must be positive");
  JDomain jd;
  jd.radius = radius;
  const auto& mesh = model.mesh;
  jd.node_weight.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    jd.node_weight[v] = (mesh.vertices[v] - model.crack->tip()).norm() <= radius ? 1.0 : 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    bool has0 = false, has1 = false;
    for (int v : mesh.elements[e]) (jd.node_weight[v] > 0.5 ? has1 : has0) = true;
    if (has0 && has1) jd.ring_elements.push_back(e);
  }
  if (jd.ring_elements.empty()) throw std::invalid_argument("J-domain radius gives an empty ring");
  return jd;
}

AuxiliaryField auxiliary_fields(const Material& m, Mode mode, double r, double theta) {
  const double inv = sif_displacement_scale(m);
  AuxiliaryField a;
  a.u = inv * tip_displacement(m, r, theta, mode);
  a.grad = inv * tip_displacement_gradient(m, r, theta, mode);
  a.stress = stress_from_gradient(elasticity_tensor(m), a.grad);
  return a;
}

namespace {

// Weight on the element boundary: linear along parent edges between nodal values.
double boundary_weight(const Model& model, const JDomain& jd, int e, const Vec2& x) {
  const auto& loop = model.mesh.elements[e];
  const int n = static_cast<int>(loop.size());
  int best = 0;
  double bd = 1e300, bl = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec2& a = model.mesh.vertices[loop[k]];
    Vec2 d = model.mesh.vertices[loop[(k + 1) % n]] - a;
    double lam = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    double dist = (a + lam * d - x).norm();
    if (dist < bd) {
      bd = dist;
      best = k;
      bl = lam;
    }
  }
  return (1.0 - bl) * jd.node_weight[loop[best]] + bl * jd.node_weight[loop[(best + 1) % n]];
}

}  // namespace

double interaction_integral(const Model& model, const JDomain& jd, const StateFunction& state, Mode mode) {
  const Crack& crack = *model.crack;
  const Mat2 R = crack.rotation();
  const Material& mat = model.material;
  const EdgeRule rule = gauss_legendre(model.options.kernel.edge_order);
  double I = 0.0;
  for (int e : jd.ring_elements) {
    for (int bi : model.element_blocks[e]) {
      const KernelBlock& b = model.blocks[bi];
      for (const auto& piece : b.geometry.pieces) {
        const double wa = boundary_weight(model, jd, e, piece.a);
        const double wb = boundary_weight(model, jd, e, piece.b);
        if (wa == 0.0 && wb == 0.0) continue;
        const Vec2 nl = R * piece.normal;
        for (const auto& q : edge_points(piece.a, piece.b, rule, crack.tip(), model.options.kernel.graded_ratio)) {
          const double w = (1.0 - q.s) * wa + q.s * wb;
          StateSample s1 = state(b, q.x, piece.side);
          const Mat2 g1 = R * s1.grad * R.transpose();
          const Mat2 st1 = R * s1.stress * R.transpose();
          PolarCoords pc = tip_polar_coords(crack, q.x, piece.side);
          AuxiliaryField aux = auxiliary_fields(mat, mode, pc.r, pc.theta);
          const Mat2 eps2 = 0.5 * (aux.grad + aux.grad.transpose());
          const double W = (st1.array() * eps2.array()).sum();
          Vec2 F;
          for (int j = 0; j < 2; ++j) {
            double v = 0.0;
            for (int i = 0; i < 2; ++i) v += st1(i, j) * aux.grad(i, 0) + aux.stress(i, j) * g1(i, 0);
            F(j) = v - (j == 0 ? W : 0.0);
          }
          I += q.w * w * F.dot(nl);
        }
      }
    }
  }
  return I;
}

double interaction_integral(const Model& model, const JDomain& jd, const Vector& u, Mode mode) {
  const Eigen::Matrix3d C = elasticity_tensor(model.material);
  std::vector<Vector> coeffs(model.blocks.size());
  for (int e : jd.ring_elements)
    for (int bi : model.element_blocks[e]) coeffs[bi] = block_coefficients(model, model.blocks[bi], u);
  StateFunction fn = [&](const KernelBlock& b, const Vec2& x, Side side) {
    const int bi = static_cast<int>(&b - model.blocks.data());
    StateSample s;
    s.grad = block_gradient(model, b, coeffs[bi], x, side);
    s.stress = stress_from_gradient(C, s.grad);
    return s;
  };
  return interaction_integral(model, jd, fn, mode);
}

SifResult extract_sifs(const Model& model, const Vector& u, double radius) {
  JDomain jd = build_jdomain(model, radius);
  SifResult r;
  r.ring_size = static_cast<int>(jd.ring_elements.size());
  r.I_I = interaction_integral(model, jd, u, Mode::I);
  r.I_II = interaction_integral(model, jd, u, Mode::II);
  const double Ep = model.material.effective_modulus();
  r.K_I = 0.5 * Ep * r.I_I;
  r.K_II = 0.5 * Ep * r.I_II;
  return r;
}

}  // namespace xvem
