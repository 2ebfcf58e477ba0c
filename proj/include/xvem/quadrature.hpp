#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "xvem/common.hpp"

namespace xvem {

// Gauss-Legendre rule on [-1, 1].
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

EdgeRule gauss_legendre(int n);

// A quadrature point on a segment a->b: position, parameter s in [0,1], weight (includes length).
struct EdgePoint {
  Vec2 x;
  double s;
  double w;
};

struct EdgeQuadratureOptions {
  int order = 16;
  // Edges closer to the singular point than graded_ratio * length are graded toward it.
  double graded_ratio = 0.5;
  double grading_factor = 0.2;
};

// Plain Gauss points on a->b.
std::vector<EdgePoint> edge_points(const Vec2& a, const Vec2& b, const EdgeRule& rule);

// Points on a->b aware of an r^{1/2}-type singular point. If the point lies on the
// segment, s = t^2 substitution is used on each side of it; if it is close, the segment
// is split geometrically toward the closest point.
std::vector<EdgePoint> edge_points(const Vec2& a, const Vec2& b, const EdgeRule& rule,
                                   const std::optional<Vec2>& singular_point,
                                   double graded_ratio = 0.5, double grading_factor = 0.2);

template <class F>
auto integrate_edge(F&& f, const Vec2& a, const Vec2& b, const EdgeRule& rule,
                    const std::optional<Vec2>& singular_point = std::nullopt,
                    double graded_ratio = 0.5) {
  const auto pts = edge_points(a, b, rule, singular_point, graded_ratio);
  using R = std::decay_t<decltype(f(pts.front().x))>;
  R acc{};
  bool first = true;
  for (const auto& p : pts) {
    R v = f(p.x);
    bool finite;
    if constexpr (std::is_arithmetic_v<R>)
      finite = std::isfinite(v);
    else
      finite = v.allFinite();
    if (!finite) {
      std::ostringstream os;
      os << "non-finite integrand at (" << p.x.x() << ", " << p.x.y() << ")";
      throw IntegrationFailure(os.str());
    }
    if (first) {
      acc = p.w * v;
      first = false;
    } else {
      acc += p.w * v;
    }
  }
  return acc;
}

// Adaptive Simpson on a parameter interval, used as an independent reference in tests.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

// Ear-clipping triangulation of a simple polygon (indices into the loop).
std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> loop);

// Conical-product rule on each triangle of a triangulation. Used as an area oracle.
struct AreaPoint {
  Vec2 x;
  double w;
};
std::vector<AreaPoint> polygon_area_points(std::span<const Vec2> loop, int order);

template <class F>
auto integrate_polygon_oracle(F&& f, std::span<const Vec2> loop, int order = 12) {
  const auto pts = polygon_area_points(loop, order);
  using R = std::decay_t<decltype(f(pts.front().x))>;
  R acc = pts.front().w * f(pts.front().x);
  for (std::size_t i = 1; i < pts.size(); ++i) acc += pts[i].w * f(pts[i].x);
  return acc;
}

}  // namespace xvem
