#pragma once

#include <array>
#include <string>

#include "xvem/common.hpp"
#include "xvem/crack.hpp"

namespace xvem {

enum class PlaneAssumption { strain, stress };

struct Material {
  double E = 1e5;
  double nu = 0.3;
  PlaneAssumption plane = PlaneAssumption::strain;

  void validate() const;
  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  // E' in the energy release rate relation.
  double effective_modulus() const { return plane == PlaneAssumption::stress ? E : E / (1.0 - nu * nu); }
};

PlaneAssumption parse_plane(const std::string& s);

// Voigt order xx, yy, xy with engineering shear strain.
Eigen::Matrix3d elasticity_tensor(const Material& m);
double kolosov(const Material& m);

// sigma = C : sym(grad u)
Mat2 stress_from_gradient(const Eigen::Matrix3d& C, const Mat2& grad);

enum class Mode { I, II };

// Crack-tip mode shapes sqrt(r/2pi) [..] in the tip frame. The bracket is twice the
// classical angular factor, so the field for a stress intensity factor K is
// K * sif_displacement_scale(m) * tip_displacement(...).
Vec2 tip_displacement(const Material& m, double r, double theta, Mode mode);
// Gradient d u_i / d x_j in the tip frame. Throws for r = 0.
Mat2 tip_displacement_gradient(const Material& m, double r, double theta, Mode mode);
Mat2 tip_stress(const Material& m, double r, double theta, Mode mode);
// 1 / (4 mu)
double sif_displacement_scale(const Material& m);

// Displacement divided by sqrt(h).
Vec2 scaled_tip_fields(const Material& m, double h, double r, double theta, Mode mode);

// Enrichment functions in global coordinates: value and gradient of u/sqrt(h).
struct EnrichmentSample {
  std::array<Vec2, 2> value;
  std::array<Mat2, 2> grad;
};

class EnrichmentField {
 public:
  EnrichmentField(const Crack& crack, const Material& m, double h_scale);
  EnrichmentSample eval(const Vec2& x, Side side, bool need_grad = true) const;
  const Crack& crack() const { return *crack_; }
  const Material& material() const { return mat_; }
  double h_scale() const { return h_; }

 private:
  const Crack* crack_;
  Material mat_;
  double h_;
  double inv_sqrt_h_;
  Mat2 R_;
};

// Extended basis m1..m8 on an element with centroid c and diameter hP. size is 6 (plain P1)
// or 8 (with the two enrichment modes).
class ExtendedBasis {
 public:
  ExtendedBasis(const Vec2& centroid, double hP, int size, const EnrichmentField* enrichment);

  int size() const { return size_; }
  const Vec2& centroid() const { return c_; }
  double diameter() const { return h_; }

  struct Sample {
    std::array<Vec2, 8> value;
    std::array<Mat2, 8> grad;
  };
  Sample eval(const Vec2& x, Side side, bool need_grad = true) const;

 private:
  Vec2 c_;
  double h_;
  int size_;
  const EnrichmentField* enr_;
};

}  // namespace xvem
