#include "xvem/material.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace xvem {

void Material::validate() const {
  if (!(E > 0.0) || !std::isfinite(E)) throw std::invalid_argument("material: E must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("material: nu must lie in (-1, 0.5)");
}

PlaneAssumption parse_plane(const std::string& s) {
  if (s == "strain") return PlaneAssumption::strain;
  if (s == "stress") return PlaneAssumption::stress;
  throw std::invalid_argument("material: plane must be \"strain\" or \"stress\"");
}

Eigen::Matrix3d elasticity_tensor(const Material& m) {
  m.validate();
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  if (m.plane == PlaneAssumption::strain) {
    double f = m.E / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
    C << f * (1.0 - m.nu), f * m.nu, 0.0, f * m.nu, f * (1.0 - m.nu), 0.0, 0.0, 0.0, f * (1.0 - 2.0 * m.nu) / 2.0;
  } else {
    double f = m.E / (1.0 - m.nu * m.nu);
    C << f, f * m.nu, 0.0, f * m.nu, f, 0.0, 0.0, 0.0, f * (1.0 - m.nu) / 2.0;
  }
  return C;
}

double kolosov(const Material& m) {
  m.validate();
  return m.plane == PlaneAssumption::strain ? 3.0 - 4.0 * m.nu : (3.0 - m.nu) / (1.0 + m.nu);
}

Mat2 stress_from_gradient(const Eigen::Matrix3d& C, const Mat2& grad) {
  Eigen::Vector3d eps(grad(0, 0), grad(1, 1), grad(0, 1) + grad(1, 0));
  Eigen::Vector3d s = C * eps;
  Mat2 sigma;
  sigma << s(0), s(2), s(2), s(1);
  return sigma;
}

namespace {

// Angular factors of the displacement and their theta derivatives.
void angular(double kappa, double theta, Mode mode, Vec2& f, Vec2& df) {
  const double c1 = std::cos(0.5 * theta), s1 = std::sin(0.5 * theta);
  const double c3 = std::cos(1.5 * theta), s3 = std::sin(1.5 * theta);
  if (mode == Mode::I) {
    f = {(2.0 * kappa - 1.0) * c1 - c3, (2.0 * kappa + 1.0) * s1 - s3};
    df = {-0.5 * (2.0 * kappa - 1.0) * s1 + 1.5 * s3, 0.5 * (2.0 * kappa + 1.0) * c1 - 1.5 * c3};
  } else {
    f = {(2.0 * kappa + 3.0) * s1 + s3, -((2.0 * kappa - 3.0) * c1 + c3)};
    df = {0.5 * (2.0 * kappa + 3.0) * c1 + 1.5 * c3, 0.5 * (2.0 * kappa - 3.0) * s1 + 1.5 * s3};
  }
}

}  // namespace

Vec2 tip_displacement(const Material& m, double r, double theta, Mode mode) {
  if (r < 0.0) throw std::invalid_argument("tip_displacement: negative radius");
  Vec2 f, df;
  angular(kolosov(m), theta, mode, f, df);
  return std::sqrt(r / (2.0 * std::numbers::pi)) * f;
}

Mat2 tip_displacement_gradient(const Material& m, double r, double theta, Mode mode) {
  if (!(r > 0.0)) throw std::invalid_argument("tip field gradient: r must be positive");
  Vec2 f, df;
  angular(kolosov(m), theta, mode, f, df);
  const double s = std::sqrt(r / (2.0 * std::numbers::pi));
  const Vec2 du_dr = s * f / (2.0 * r);
  const Vec2 du_dth = s * df;
  const double c = std::cos(theta), sn = std::sin(theta);
  Mat2 g;
  g.col(0) = c * du_dr - sn / r * du_dth;
  g.col(1) = sn * du_dr + c / r * du_dth;
  return g;
}

double sif_displacement_scale(const Material& m) { return 0.25 / m.shear_modulus(); }

Mat2 tip_stress(const Material& m, double r, double theta, Mode mode) {
  return stress_from_gradient(elasticity_tensor(m), tip_displacement_gradient(m, r, theta, mode));
}

Vec2 scaled_tip_fields(const Material& m, double h, double r, double theta, Mode mode) {
  if (!(h > 0.0)) throw std::invalid_argument("scaled_tip_fields: h must be positive");
  return tip_displacement(m, r, theta, mode) / std::sqrt(h);
}

EnrichmentField::EnrichmentField(const Crack& crack, const Material& m, double h_scale)
    : crack_(&crack), mat_(m), h_(h_scale) {
  if (!(h_scale > 0.0)) throw std::invalid_argument("enrichment: scale must be positive");
  m.validate();
  inv_sqrt_h_ = 1.0 / std::sqrt(h_scale);
  R_ = crack.rotation();
}

EnrichmentSample EnrichmentField::eval(const Vec2& x, Side side, bool need_grad) const {
  EnrichmentSample out;
  PolarCoords pc = tip_polar_coords(*crack_, x, side);
  const double kappa = kolosov(mat_);
  const double s = std::sqrt(pc.r / (2.0 * std::numbers::pi));
  const double c = std::cos(pc.theta), sn = std::sin(pc.theta);
  for (int k = 0; k < 2; ++k) {
    Mode mode = k == 0 ? Mode::I : Mode::II;
    Vec2 f, df;
    angular(kappa, pc.theta, mode, f, df);
    out.value[k] = inv_sqrt_h_ * (R_.transpose() * (s * f));
    if (!need_grad) continue;
    if (pc.degenerate) {
      out.grad[k].setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const Vec2 du_dr = s * f / (2.0 * pc.r);
    const Vec2 du_dth = s * df;
    Mat2 g;
    g.col(0) = c * du_dr - sn / pc.r * du_dth;
    g.col(1) = sn * du_dr + c / pc.r * du_dth;
    out.grad[k] = inv_sqrt_h_ * (R_.transpose() * g * R_);
  }
  return out;
}

ExtendedBasis::ExtendedBasis(const Vec2& centroid, double hP, int size, const EnrichmentField* enrichment)
    : c_(centroid), h_(hP), size_(size), enr_(enrichment) {
  if (size != 6 && size != 8) throw std::invalid_argument("basis size must be 6 or 8");
  if (size == 8 && !enrichment) throw std::invalid_argument("enriched basis needs an enrichment field");
}

ExtendedBasis::Sample ExtendedBasis::eval(const Vec2& x, Side side, bool need_grad) const {
  Sample s;
  const double xi = (x.x() - c_.x()) / h_, eta = (x.y() - c_.y()) / h_;
  const double ih = 1.0 / h_;
  s.value[0] = {1.0, 0.0};
  s.value[1] = {0.0, 1.0};
  s.value[2] = {eta, -xi};
  s.value[3] = {xi, 0.0};
  s.value[4] = {0.0, eta};
  s.value[5] = {eta, xi};
  if (need_grad) {
    s.grad[0].setZero();
    s.grad[1].setZero();
    s.grad[2] << 0.0, ih, -ih, 0.0;
    s.grad[3] << ih, 0.0, 0.0, 0.0;
    s.grad[4] << 0.0, 0.0, 0.0, ih;
    s.grad[5] << 0.0, ih, ih, 0.0;
  }
  if (size_ == 8) {
    EnrichmentSample e = enr_->eval(x, side, need_grad);
    s.value[6] = e.value[0];
    s.value[7] = e.value[1];
    if (need_grad) {
      s.grad[6] = e.grad[0];
      s.grad[7] = e.grad[1];
    }
  }
  return s;
}

}  // namespace xvem
