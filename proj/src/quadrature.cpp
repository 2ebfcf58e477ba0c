#include "xvem/quadrature.hpp"

#include <algorithm>
#include <functional>
#include <numbers>

namespace xvem {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

EdgeRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  EdgeRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double dp = legendre(n, x).second;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

namespace {

void append_plain(std::vector<EdgePoint>& out, const Vec2& a, const Vec2& b, double s0, double s1,
                  const EdgeRule& rule) {
  const double L = (b - a).norm();
  const double half = 0.5 * (s1 - s0);
  for (int q = 0; q < rule.size(); ++q) {
    double s = s0 + half * (rule.points[q] + 1.0);
    out.push_back({a + s * (b - a), s, rule.weights[q] * std::abs(half) * L});
  }
}

// s = sp + (s1 - sp) t^2 with the singular point at sp.
void append_sqrt(std::vector<EdgePoint>& out, const Vec2& a, const Vec2& b, double sp, double s1,
                 const EdgeRule& rule) {
  const double L = (b - a).norm();
  const double len = s1 - sp;
  for (int q = 0; q < rule.size(); ++q) {
    double t = 0.5 * (rule.points[q] + 1.0);
    double s = sp + len * t * t;
    double w = rule.weights[q] * 0.5 * 2.0 * t * std::abs(len) * L;
    out.push_back({a + s * (b - a), s, w});
  }
}

void append_graded(std::vector<EdgePoint>& out, const Vec2& a, const Vec2& b, double sp, double s1,
                   double dist_s, double factor, const EdgeRule& rule) {
  // intervals [sp + len q^{k+1}, sp + len q^k] down to the scale of the distance
  const double len = s1 - sp;
  double outer = 1.0;
  while (std::abs(len) * outer > dist_s && outer > 1e-14) {
    double inner = outer * factor;
    append_plain(out, a, b, sp + len * inner, sp + len * outer, rule);
    outer = inner;
  }
  append_plain(out, a, b, sp, sp + len * outer, rule);
}

}  // namespace

std::vector<EdgePoint> edge_points(const Vec2& a, const Vec2& b, const EdgeRule& rule) {
  std::vector<EdgePoint> out;
  out.reserve(rule.size());
  append_plain(out, a, b, 0.0, 1.0, rule);
  return out;
}

std::vector<EdgePoint> edge_points(const Vec2& a, const Vec2& b, const EdgeRule& rule,
                                   const std::optional<Vec2>& singular_point, double graded_ratio,
                                   double grading_factor) {
  if (!singular_point) return edge_points(a, b, rule);
  const Vec2 d = b - a;
  const double L2 = d.squaredNorm();
  const double L = std::sqrt(L2);
  const Vec2& p = *singular_point;
  double s0 = std::clamp((p - a).dot(d) / L2, 0.0, 1.0);
  const double dist = (p - (a + s0 * d)).norm();
  std::vector<EdgePoint> out;
  const double on_tol = 1e-12 * std::max(L, 1.0);
  if (dist <= on_tol) {
    if (s0 <= 1e-12) {
      append_sqrt(out, a, b, 0.0, 1.0, rule);
    } else if (s0 >= 1.0 - 1e-12) {
      append_sqrt(out, a, b, 1.0, 0.0, rule);
    } else {
      append_sqrt(out, a, b, s0, 0.0, rule);
      append_sqrt(out, a, b, s0, 1.0, rule);
    }
    return out;
  }
  if (dist < graded_ratio * L) {
    const double ds = dist / L;
    if (s0 > 0.0) append_graded(out, a, b, s0, 0.0, ds, grading_factor, rule);
    if (s0 < 1.0) append_graded(out, a, b, s0, 1.0, ds, grading_factor, rule);
    return out;
  }
  append_plain(out, a, b, 0.0, 1.0, rule);
  return out;
}

namespace {
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> loop) {
  const int n = static_cast<int>(loop.size());
  if (n < 3) throw std::invalid_argument("triangulate_polygon: fewer than 3 vertices");
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) area2 += cross(loop[i], loop[(i + 1) % n]);
  const double orient = area2 >= 0.0 ? 1.0 : -1.0;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  int guard = 0;
  while (idx.size() > 3 && guard < 10 * n * n) {
    ++guard;
    bool clipped = false;
    const int m = static_cast<int>(idx.size());
    for (int k = 0; k < m; ++k) {
      int i0 = idx[(k + m - 1) % m], i1 = idx[k], i2 = idx[(k + 1) % m];
      const Vec2 &a = loop[i0], &b = loop[i1], &c = loop[i2];
      if (orient * cross(b - a, c - b) <= 0.0) continue;
      bool inside = false;
      for (int j = 0; j < m && !inside; ++j) {
        int q = idx[j];
        if (q == i0 || q == i1 || q == i2) continue;
        const Vec2& p = loop[q];
        double c1 = orient * cross(b - a, p - a);
        double c2 = orient * cross(c - b, p - b);
        double c3 = orient * cross(a - c, p - c);
        if (c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0) inside = true;
      }
      if (inside) continue;
      tris.push_back({i0, i1, i2});
      idx.erase(idx.begin() + k);
      clipped = true;
      break;
    }
    if (!clipped) {
      // degenerate input: fall back to a fan for what is left
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) tris.push_back({idx[0], idx[k], idx[k + 1]});
      return tris;
    }
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

std::vector<AreaPoint> polygon_area_points(std::span<const Vec2> loop, int order) {
  const EdgeRule g = gauss_legendre(order);
  std::vector<AreaPoint> out;
  for (const auto& t : triangulate_polygon(loop)) {
    const Vec2 &p0 = loop[t[0]], &p1 = loop[t[1]], &p2 = loop[t[2]];
    const double jac = std::abs(cross(p1 - p0, p2 - p0));
    for (int i = 0; i < g.size(); ++i) {
      double u = 0.5 * (g.points[i] + 1.0);
      for (int j = 0; j < g.size(); ++j) {
        double v = 0.5 * (g.points[j] + 1.0);
        Vec2 x = p0 + u * ((1.0 - v) * (p1 - p0) + v * (p2 - p0));
        out.push_back({x, 0.25 * g.weights[i] * g.weights[j] * u * jac});
      }
    }
  }
  return out;
}

}  // namespace xvem
