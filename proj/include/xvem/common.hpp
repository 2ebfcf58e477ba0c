#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace xvem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Rotate by +90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

// Side of the crack a point or a block lives on. Only matters on the crack faces.
enum class Side { plus, minus };

inline double side_sign(Side s) { return s == Side::plus ? 1.0 : -1.0; }

// ---- error kinds ----

struct GenerationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IntegrationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KernelFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TraceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSplittable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSystem : SolverFailure {
  using SolverFailure::SolverFailure;
};
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace xvem
