#pragma once

#include <functional>
#include <vector>

#include "xvem/system.hpp"

namespace xvem {

// Ring of elements crossed by the circle of radius r_d about the tip. Nodal weight 1 inside.
struct JDomain {
  double radius = 0.0;
  std::vector<double> node_weight;
  std::vector<int> ring_elements;
};

JDomain build_jdomain(const Model& model, double radius);

// Williams field for unit K in the tip frame.
struct AuxiliaryField {
  Vec2 u;
  Mat2 grad;
  Mat2 stress;
};

AuxiliaryField auxiliary_fields(const Material& m, Mode mode, double r, double theta);

// State evaluated in global coordinates on a block boundary.
struct StateSample {
  Mat2 grad;
  Mat2 stress;
};
using StateFunction = std::function<StateSample(const KernelBlock& block, const Vec2& x, Side side)>;

// Boundary form of the interaction integral over the ring blocks.
double interaction_integral(const Model& model, const JDomain& jd, const StateFunction& state, Mode mode);
double interaction_integral(const Model& model, const JDomain& jd, const Vector& u, Mode mode);

struct SifResult {
  double K_I = 0.0;
  double K_II = 0.0;
  double I_I = 0.0;
  double I_II = 0.0;
  int ring_size = 0;
};

SifResult extract_sifs(const Model& model, const Vector& u, double radius);

}  // namespace xvem
