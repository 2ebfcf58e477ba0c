#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "xvem/experiments.hpp"
#include "xvem/material.hpp"

using namespace xvem;

namespace {

constexpr double pi = std::numbers::pi;

Material plane(PlaneAssumption p, double E = 1e5, double nu = 0.3) {
  Material m;
  m.E = E;
  m.nu = nu;
  m.plane = p;
  return m;
}

// Polar field as a function of local Cartesian coordinates (theta in (-pi, pi)).
Vec2 field_xy(const Material& m, const Vec2& x, Mode mode) {
  return tip_displacement(m, x.norm(), std::atan2(x.y(), x.x()), mode);
}

}  // namespace

TEST(Material, ValidationAndParsing) {
  EXPECT_NO_THROW(plane(PlaneAssumption::strain).validate());
  EXPECT_ANY_THROW(plane(PlaneAssumption::strain, -1.0).validate());
  EXPECT_ANY_THROW(plane(PlaneAssumption::strain, 1.0, 0.5).validate());
  EXPECT_ANY_THROW(plane(PlaneAssumption::stress, 1.0, -1.0).validate());
  EXPECT_EQ(parse_plane("stress"), PlaneAssumption::stress);
  EXPECT_ANY_THROW(parse_plane("membrane"));
}

TEST(Material, ElasticityTensors) {
  auto s = plane(PlaneAssumption::strain, 1.0, 0.25);
  auto C = elasticity_tensor(s);
  const double lam = 0.25 / (1.25 * 0.5), mu = 1.0 / 2.5;
  EXPECT_NEAR(C(0, 0), lam + 2 * mu, 1e-15);
  EXPECT_NEAR(C(0, 1), lam, 1e-15);
  EXPECT_NEAR(C(2, 2), mu, 1e-15);
  EXPECT_NEAR(kolosov(s), 3 - 4 * 0.25, 1e-15);
  auto t = plane(PlaneAssumption::stress, 1.0, 0.25);
  auto Ct = elasticity_tensor(t);
  EXPECT_NEAR(Ct(0, 0), 1.0 / (1 - 0.0625), 1e-15);
  EXPECT_NEAR(kolosov(t), (3 - 0.25) / 1.25, 1e-15);
  EXPECT_NEAR(sif_displacement_scale(s), 1.0 / (4 * mu), 1e-15);
}

TEST(Material, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(0.05, 2.0), th(-3.0, 3.0);
  for (auto p : {PlaneAssumption::strain, PlaneAssumption::stress})
    for (Mode mode : {Mode::I, Mode::II})
      for (int t = 0; t < 50; ++t) {
        auto m = plane(p);
        const double rr = r(rng), tt = th(rng);
        Vec2 x(rr * std::cos(tt), rr * std::sin(tt));
        Mat2 G = tip_displacement_gradient(m, rr, tt, mode);
        const double h = 1e-6 * rr;
        for (int j = 0; j < 2; ++j) {
          Vec2 e = Vec2::Zero();
          e(j) = h;
          Vec2 fd = (field_xy(m, x + e, mode) - field_xy(m, x - e, mode)) / (2 * h);
          EXPECT_NEAR(G(0, j), fd(0), 1e-6 * G.norm());
          EXPECT_NEAR(G(1, j), fd(1), 1e-6 * G.norm());
        }
      }
  EXPECT_ANY_THROW(tip_displacement_gradient(Material{}, 0.0, 0.0, Mode::I));
}

TEST(Material, ClassicalStressesAheadOfTip) {
  for (auto p : {PlaneAssumption::strain, PlaneAssumption::stress}) {
    auto m = plane(p);
    const double s = sif_displacement_scale(m), r = 0.3;
    Mat2 sI = s * tip_stress(m, r, 0.0, Mode::I);
    Mat2 sII = s * tip_stress(m, r, 0.0, Mode::II);
    EXPECT_NEAR(sI(1, 1), 1.0 / std::sqrt(2 * pi * r), 1e-12);
    EXPECT_NEAR(sI(0, 0), 1.0 / std::sqrt(2 * pi * r), 1e-12);
    EXPECT_NEAR(sI(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(sII(0, 1), 1.0 / std::sqrt(2 * pi * r), 1e-12);
    EXPECT_NEAR(sII(1, 1), 0.0, 1e-12);
  }
}

TEST(Material, CrackFacesAreTractionFree) {
  auto m = plane(PlaneAssumption::strain);
  for (Mode mode : {Mode::I, Mode::II})
    for (double th : {pi, -pi}) {
      Mat2 s = tip_stress(m, 0.4, th, mode);
      EXPECT_NEAR(s(1, 1), 0.0, 1e-10 * s.norm());
      EXPECT_NEAR(s(0, 1), 0.0, 1e-10 * s.norm());
    }
}

TEST(Material, FieldsAreInEquilibrium) {
  auto m = plane(PlaneAssumption::strain, 1.0, 0.3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> r(0.2, 1.0), th(-2.8, 2.8);
  for (Mode mode : {Mode::I, Mode::II})
    for (int t = 0; t < 20; ++t) {
      const double rr = r(rng), tt = th(rng);
      Vec2 x(rr * std::cos(tt), rr * std::sin(tt));
      auto sigma = [&](const Vec2& y) { return tip_stress(m, y.norm(), std::atan2(y.y(), y.x()), mode); };
      const double h = 1e-5;
      Vec2 div = Vec2::Zero();
      for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e(j) = h;
        Mat2 d = (sigma(x + e) - sigma(x - e)) / (2 * h);
        div += d.col(j);
      }
      EXPECT_LT(div.norm(), 1e-5 * sigma(x).norm() / rr);
    }
}

TEST(Material, EnrichmentFieldIsRotatedAndScaled) {
  const double b = 0.6;
  Crack c({{0, 0}, {std::cos(b), std::sin(b)}});
  auto m = plane(PlaneAssumption::strain);
  const double h = 0.04;
  EnrichmentField f(c, m, h);
  Vec2 x = c.tip() + 0.3 * Vec2(std::cos(b + 1.0), std::sin(b + 1.0));
  auto smp = f.eval(x, Side::plus);
  Vec2 local = tip_displacement(m, 0.3, 1.0, Mode::I) / std::sqrt(h);
  Vec2 global = local.x() * c.tangent() + local.y() * c.normal();
  EXPECT_LT((smp.value[0] - global).norm(), 1e-12 * global.norm());
  for (int mode = 0; mode < 2; ++mode)
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e(j) = 1e-6;
      Vec2 fd = (f.eval(x + e, Side::plus, false).value[mode] - f.eval(x - e, Side::plus, false).value[mode]) / 2e-6;
      EXPECT_LT((smp.grad[mode].col(j) - fd).norm(), 1e-6 * smp.grad[mode].norm());
    }
}

TEST(Material, ExtendedBasisMonomialsAndGradients) {
  Crack c({{-2, 0}, {-1, 0}});
  Material m;
  EnrichmentField f(c, m, 0.5);
  const Vec2 centre(0.2, 0.1);
  const double hP = 0.5;
  ExtendedBasis basis(centre, hP, 8, &f);
  Vec2 x(0.3, -0.05);
  auto s = basis.eval(x, Side::plus);
  const Vec2 xi = (x - centre) / hP;
  EXPECT_LT((s.value[0] - Vec2(1, 0)).norm(), 1e-15);
  EXPECT_LT((s.value[1] - Vec2(0, 1)).norm(), 1e-15);
  EXPECT_LT((s.value[2] - Vec2(xi.y(), -xi.x())).norm(), 1e-15);
  auto fe = f.eval(x, Side::plus);
  EXPECT_LT((s.value[6] - fe.value[0]).norm(), 1e-15);
  EXPECT_LT((s.value[7] - fe.value[1]).norm(), 1e-15);
  for (int a = 0; a < 8; ++a)
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e(j) = 1e-6;
      Vec2 fd = (basis.eval(x + e, Side::plus, false).value[a] - basis.eval(x - e, Side::plus, false).value[a]) / 2e-6;
      EXPECT_LT((s.grad[a].col(j) - fd).norm(), 1e-6 * std::max(1.0, s.grad[a].norm())) << "m" << a + 1;
    }
  // the linear monomials 4..6 have constant, linearly independent symmetric gradients
  Eigen::Matrix3d eps;
  for (int a = 3; a < 6; ++a) {
    Mat2 g = 0.5 * (s.grad[a] + s.grad[a].transpose());
    eps.col(a - 3) << g(0, 0), g(1, 1), 2 * g(0, 1);
  }
  EXPECT_GT(std::abs(eps.determinant()), 1e-6);
}

TEST(Material, ReferenceEnergyOfUnitMixedModeField) {
  Material m;
  ExactTipField field(benchmark_crack(), m, 1.0, 1.0);
  const double E = 0.5 * exact_energy(field, benchmark_domain(), benchmark_crack());
  EXPECT_NEAR(E, 1.6776885579e-5, 1e-14);
}

TEST(Material, EnergyScalesQuadraticallyWithK) {
  Material m;
  ExactTipField a(benchmark_crack(), m, 1.0, 0.0), b(benchmark_crack(), m, 2.0, 0.0);
  const double ea = exact_energy(a, benchmark_domain(), benchmark_crack());
  EXPECT_NEAR(exact_energy(b, benchmark_domain(), benchmark_crack()), 4 * ea, 1e-12 * ea);
}
