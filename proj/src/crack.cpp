#include "xvem/crack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace xvem {

Crack::Crack(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("crack: need at least two points");
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    double L = (points_[i + 1] - points_[i]).norm();
    if (!(L > 0.0)) throw std::invalid_argument("crack: repeated point");
    length_ += L;
  }
  t_ = (points_.back() - points_[points_.size() - 2]).normalized();
  n_ = perp(t_);
}

Mat2 Crack::rotation() const {
  Mat2 R;
  R.row(0) = t_.transpose();
  R.row(1) = n_.transpose();
  return R;
}

namespace {

struct Closest {
  double dist;
  int segment;
  double s;
};

Closest closest_point(const std::vector<Vec2>& pts, const Vec2& x) {
  Closest best{1e300, 0, 0.0};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    Vec2 d = pts[k + 1] - pts[k];
    double s = std::clamp((x - pts[k]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    double dist = (pts[k] + s * d - x).norm();
    if (dist < best.dist) best = {dist, static_cast<int>(k), s};
  }
  return best;
}

}  // namespace

double Crack::distance(const Vec2& x) const { return closest_point(points_, x).dist; }

bool Crack::on_faces(const Vec2& x) const {
  return distance(x) <= face_tol() && (x - tip()).norm() > face_tol();
}

double signed_distance(const Crack& crack, const Vec2& x) {
  const auto& pts = crack.points();
  Closest c = closest_point(pts, x);
  const int last = static_cast<int>(pts.size()) - 2;
  double sgn;
  if (c.segment == last && c.s >= 1.0) {
    sgn = crack.normal().dot(x - crack.tip());
  } else {
    Vec2 d = pts[c.segment + 1] - pts[c.segment];
    sgn = cross(d, x - pts[c.segment]);
  }
  if (c.dist == 0.0) return 0.0;
  return sgn >= 0.0 ? c.dist : -c.dist;
}

PolarCoords tip_polar_coords(const Crack& crack, const Vec2& x) {
  Vec2 l = crack.to_local(x);
  PolarCoords p;
  p.r = l.norm();
  if (p.r <= 1e-14 * std::max(1.0, crack.length())) {
    p.degenerate = true;
    p.theta = 0.0;
    return p;
  }
  if (std::abs(l.y()) <= crack.face_tol() && l.x() < 0.0)
    p.theta = std::numbers::pi;
  else
    p.theta = std::atan2(l.y(), l.x());
  return p;
}

PolarCoords tip_polar_coords(const Crack& crack, const Vec2& x, Side side) {
  PolarCoords p = tip_polar_coords(crack, x);
  if (!p.degenerate) {
    Vec2 l = crack.to_local(x);
    if (std::abs(l.y()) <= crack.face_tol() && l.x() < 0.0)
      p.theta = side == Side::plus ? std::numbers::pi : -std::numbers::pi;
    // continue the branch across the crack line (ghost vertices of Hansbo blocks)
    else if (side == Side::plus && p.theta < -0.5 * std::numbers::pi)
      p.theta += 2.0 * std::numbers::pi;
    else if (side == Side::minus && p.theta > 0.5 * std::numbers::pi)
      p.theta -= 2.0 * std::numbers::pi;
  }
  return p;
}

int point_in_polygon(const std::vector<Vec2>& loop, const Vec2& p, double tol) {
  const int n = static_cast<int>(loop.size());
  double dmin = 1e300;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = loop[i];
    Vec2 d = loop[(i + 1) % n] - a;
    double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    dmin = std::min(dmin, (a + s * d - p).norm());
  }
  if (dmin <= tol) return 0;
  int wn = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % n];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross(b - a, p - a) > 0.0) ++wn;
    } else if (b.y() <= p.y() && cross(b - a, p - a) < 0.0) {
      --wn;
    }
  }
  return wn != 0 ? 1 : -1;
}

namespace {

double loop_diameter(const std::vector<Vec2>& loop) {
  double h = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    for (std::size_t j = i + 1; j < loop.size(); ++j) h = std::max(h, (loop[i] - loop[j]).norm());
  return h;
}

// Maximal pieces of the crack polyline lying in the open polygon.
std::vector<std::vector<Vec2>> inside_pieces(const std::vector<Vec2>& loop, const Crack& crack) {
  const auto& pts = crack.points();
  const int n = static_cast<int>(loop.size());
  const double h = loop_diameter(loop);
  const double tol = 1e-10 * h;
  std::vector<std::vector<Vec2>> pieces;
  bool open = false;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2& p = pts[k];
    const Vec2 d = pts[k + 1] - p;
    const double dl = d.norm();
    std::vector<double> taus = {0.0, 1.0};
    for (int i = 0; i < n; ++i) {
      const Vec2& a = loop[i];
      const Vec2 e = loop[(i + 1) % n] - a;
      double den = cross(d, e);
      if (std::abs(den) > 1e-14 * dl * e.norm()) {
        double tau = cross(a - p, e) / den;
        double sig = cross(a - p, d) / den;
        double et = tol / dl, es = tol / e.norm();
        if (tau >= -et && tau <= 1.0 + et && sig >= -es && sig <= 1.0 + es)
          taus.push_back(std::clamp(tau, 0.0, 1.0));
      } else if (std::abs(cross(a - p, d)) <= tol * dl) {
        for (const Vec2& q : {a, Vec2(a + e)}) {
          double tau = (q - p).dot(d) / (dl * dl);
          if (tau > 0.0 && tau < 1.0) taus.push_back(tau);
        }
      }
    }
    std::sort(taus.begin(), taus.end());
    for (std::size_t j = 0; j + 1 < taus.size(); ++j) {
      double ta = taus[j], tb = taus[j + 1];
      if ((tb - ta) * dl <= tol) continue;
      Vec2 mid = p + 0.5 * (ta + tb) * d;
      bool inside = point_in_polygon(loop, mid, tol) == 1;
      if (inside) {
        Vec2 a = p + ta * d, b = p + tb * d;
        if (open && (pieces.back().back() - a).norm() <= tol) {
          pieces.back().push_back(b);
        } else {
          pieces.push_back({a, b});
        }
        open = true;
      } else {
        open = false;
      }
    }
    // a piece continues into the next segment only through the shared polyline vertex
    if (open && (pieces.back().back() - pts[k + 1]).norm() > tol) open = false;
  }
  // collapse collinear interior points produced by edge parameters
  for (auto& piece : pieces) {
    std::vector<Vec2> clean = {piece.front()};
    for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
      Vec2 u = piece[i] - clean.back(), v = piece[i + 1] - piece[i];
      if (std::abs(cross(u, v)) > 1e-12 * u.norm() * v.norm()) clean.push_back(piece[i]);
    }
    clean.push_back(piece.back());
    piece = std::move(clean);
  }
  return pieces;
}

struct Augmented {
  std::vector<SubVertex> verts;
  std::vector<int> edge_start;  // parent edge the boundary follows from this vertex
};

// Insert boundary points into the loop. Returns the augmented loop and the index of each point.
Augmented augment(const std::vector<Vec2>& loop, const std::vector<Vec2>& points, double snap,
                  std::vector<int>& index) {
  const int n = static_cast<int>(loop.size());
  struct Ins {
    int edge;
    double lambda;
    Vec2 x;
    int which;
  };
  std::vector<Ins> ins;
  std::vector<int> at_vertex(points.size(), -1);
  for (std::size_t q = 0; q < points.size(); ++q) {
    const Vec2& x = points[q];
    for (int j = 0; j < n; ++j)
      if ((loop[j] - x).norm() <= snap) {
        at_vertex[q] = j;
        break;
      }
    if (at_vertex[q] >= 0) continue;
    int best = -1;
    double bd = 1e300, bl = 0.0;
    for (int k = 0; k < n; ++k) {
      Vec2 e = loop[(k + 1) % n] - loop[k];
      double lam = std::clamp((x - loop[k]).dot(e) / e.squaredNorm(), 0.0, 1.0);
      double dist = (loop[k] + lam * e - x).norm();
      if (dist < bd) {
        bd = dist;
        best = k;
        bl = lam;
      }
    }
    if (bd > 1e3 * snap) throw NotSplittable("crack point is not on the element boundary");
    ins.push_back({best, bl, x, static_cast<int>(q)});
  }
  std::sort(ins.begin(), ins.end(), [](const Ins& a, const Ins& b) {
    return a.edge != b.edge ? a.edge < b.edge : a.lambda < b.lambda;
  });
  Augmented aug;
  index.assign(points.size(), -1);
  std::size_t c = 0;
  for (int j = 0; j < n; ++j) {
    aug.verts.push_back({loop[j], j});
    aug.edge_start.push_back(j);
    for (std::size_t q = 0; q < points.size(); ++q)
      if (at_vertex[q] == j) index[q] = static_cast<int>(aug.verts.size()) - 1;
    while (c < ins.size() && ins[c].edge == j) {
      index[ins[c].which] = static_cast<int>(aug.verts.size());
      aug.verts.push_back({ins[c].x, -1});
      aug.edge_start.push_back(j);
      ++c;
    }
  }
  return aug;
}

}  // namespace

std::vector<Vec2> SubPolygon::loop() const {
  std::vector<Vec2> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.x);
  return out;
}

ElementClass relate_polygon(const std::vector<Vec2>& loop, const Crack& crack, bool tip_interior) {
  auto pieces = inside_pieces(loop, crack);
  if (pieces.empty()) return ElementClass::uncut;
  const double tol = 1e-10 * loop_diameter(loop);
  const int where = point_in_polygon(loop, crack.tip(), tol);
  if (where == 1 || (where == 0 && tip_interior)) return ElementClass::tip;
  return ElementClass::cut;
}

bool on_mesh_boundary(const PolygonalMesh& mesh, const Vec2& p, double tol) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& loop : mesh.elements)
    for (std::size_t k = 0; k < loop.size(); ++k) {
      int a = loop[k], b = loop[(k + 1) % loop.size()];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  for (const auto& [key, c] : count) {
    if (c != 1) continue;
    const Vec2& a = mesh.vertices[key.first];
    Vec2 d = mesh.vertices[key.second] - a;
    double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    if ((a + s * d - p).norm() <= tol) return true;
  }
  return false;
}

SplitElement split_polygon(const std::vector<Vec2>& loop, const Crack& crack, bool tip_interior) {
  const double h = loop_diameter(loop);
  const double tol = 1e-10 * h;
  auto pieces = inside_pieces(loop, crack);
  if (pieces.empty()) throw NotSplittable("crack does not cross the element");
  if (pieces.size() > 1) throw NotSplittable("crack crosses the element more than once");
  const int where = point_in_polygon(loop, crack.tip(), tol);
  if (where == 1 || (where == 0 && tip_interior)) throw NotSplittable("crack tip lies in the element");
  std::vector<Vec2> path = pieces.front();
  std::vector<int> idx;
  Augmented aug = augment(loop, {path.front(), path.back()}, tol, idx);
  path.front() = aug.verts[idx[0]].x;
  path.back() = aug.verts[idx[1]].x;
  if (idx[0] == idx[1]) throw NotSplittable("crack enters and leaves through one point");
  const int m = static_cast<int>(aug.verts.size());
  auto chain = [&](int from, int to, SubPolygon& sp) {
    for (int i = from;; i = (i + 1) % m) {
      sp.vertices.push_back(aug.verts[i]);
      if (i == to) break;
      sp.edge_parent.push_back(aug.edge_start[i]);
    }
  };
  SplitElement out;
  out.crack_path = path;
  // minus: boundary A -> B counter-clockwise, back along the crack
  out.minus.side = Side::minus;
  chain(idx[0], idx[1], out.minus);
  for (int i = static_cast<int>(path.size()) - 2; i >= 1; --i) {
    out.minus.edge_parent.push_back(-1);
    out.minus.vertices.push_back({path[i], -1});
  }
  out.minus.edge_parent.push_back(-1);
  // plus: boundary B -> A counter-clockwise, then along the crack
  out.plus.side = Side::plus;
  chain(idx[1], idx[0], out.plus);
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    out.plus.edge_parent.push_back(-1);
    out.plus.vertices.push_back({path[i], -1});
  }
  out.plus.edge_parent.push_back(-1);
  for (const SubPolygon* sp : {&out.minus, &out.plus})
    if (polygon_geometry(sp->loop()).area <= 0.0) throw NotSplittable("degenerate sub-polygon");
  return out;
}

SplitElement split_element(const PolygonalMesh& mesh, int e, const Crack& crack) {
  const bool interior = !on_mesh_boundary(mesh, crack.tip(), 1e-10 * mesh.max_diameter());
  SplitElement s = split_polygon(mesh.element_loop(e), crack, interior);
  s.element = e;
  return s;
}

TipSlit tip_slit(const std::vector<Vec2>& loop, const Crack& crack) {
  const double h = loop_diameter(loop);
  const double tol = 1e-10 * h;
  auto pieces = inside_pieces(loop, crack);
  if (pieces.size() != 1) throw NotSplittable("tip element must hold exactly one crack piece");
  std::vector<Vec2> path = pieces.front();
  if ((path.back() - crack.tip()).norm() > tol) throw NotSplittable("crack piece does not end at the tip");
  if (point_in_polygon(loop, path.front(), tol) != 0) throw NotSplittable("crack starts inside the element");
  std::vector<Vec2> pts = {path.front()};
  const bool tip_on_boundary = point_in_polygon(loop, crack.tip(), tol) == 0;
  if (tip_on_boundary) pts.push_back(crack.tip());
  std::vector<int> idx;
  Augmented aug = augment(loop, pts, tol, idx);
  path.front() = aug.verts[idx[0]].x;
  if (tip_on_boundary) path.back() = aug.verts[idx[1]].x;
  TipSlit slit;
  slit.loop = aug.verts;
  slit.edge_parent = aug.edge_start;
  slit.path = path;
  return slit;
}

int EnrichmentPlan::num_enriched_nodes() const {
  return static_cast<int>(std::count(node_enriched.begin(), node_enriched.end(), true));
}

EnrichmentPlan empty_plan(const PolygonalMesh& mesh) {
  EnrichmentPlan p;
  const int nv = mesh.num_vertices(), ne = mesh.num_elements();
  p.node_enriched.assign(nv, false);
  p.node_doubled.assign(nv, false);
  p.node_on_crack.assign(nv, false);
  p.element_class.assign(ne, ElementClass::uncut);
  p.element_side.assign(ne, Side::plus);
  p.enriched_count.assign(ne, 0);
  p.tip_adjacent.assign(ne, false);
  return p;
}

EnrichmentPlan classify_elements(const PolygonalMesh& mesh, const Crack& crack, EnrichmentMode mode,
                                 double radius) {
  if (mode == EnrichmentMode::geometric && !(radius > 0.0))
    throw std::invalid_argument("classify_elements: geometric enrichment needs a positive radius");
  EnrichmentPlan p = empty_plan(mesh);
  p.mode = mode;
  p.radius = radius;
  const int nv = mesh.num_vertices(), ne = mesh.num_elements();
  const double h = mesh.max_diameter();
  const double node_tol = 1e-10 * h;

  p.tip_interior = !on_mesh_boundary(mesh, crack.tip(), node_tol);
  bool tip_in_domain = false;
  std::vector<bool> tip_element_vertex(nv, false);
  for (int e = 0; e < ne; ++e) {
    auto loop = mesh.element_loop(e);
    auto g = polygon_geometry(loop);
    const double etol = 1e-10 * g.diameter;
    if (point_in_polygon(loop, crack.tip(), etol) >= 0) {
      tip_in_domain = true;
      p.tip_adjacent[e] = true;
    }
    p.element_class[e] = relate_polygon(loop, crack, p.tip_interior);
    p.element_side[e] = signed_distance(crack, g.centroid) >= 0.0 ? Side::plus : Side::minus;
    if (p.element_class[e] == ElementClass::tip)
      for (int v : mesh.elements[e]) tip_element_vertex[v] = true;
  }
  if (!tip_in_domain) throw std::invalid_argument("classify_elements: crack tip outside the domain");

  for (int v = 0; v < nv; ++v) {
    const Vec2& x = mesh.vertices[v];
    p.node_on_crack[v] = crack.distance(x) <= node_tol && (x - crack.tip()).norm() > node_tol;
    p.node_doubled[v] = p.node_on_crack[v];
  }
  for (int e = 0; e < ne; ++e)
    if (p.element_class[e] == ElementClass::cut)
      for (int v : mesh.elements[e]) p.node_doubled[v] = true;
  for (int v = 0; v < nv; ++v)
    if (tip_element_vertex[v]) p.node_doubled[v] = false;

  if (mode == EnrichmentMode::geometric) {
    for (int v = 0; v < nv; ++v) p.node_enriched[v] = (mesh.vertices[v] - crack.tip()).norm() <= radius;
  } else if (mode == EnrichmentMode::topological) {
    bool any = false;
    for (int v = 0; v < nv; ++v)
      if ((mesh.vertices[v] - crack.tip()).norm() <= 1e-12 * h) p.node_enriched[v] = any = true;
    if (!any)
      for (int v = 0; v < nv; ++v)
        if (tip_element_vertex[v]) p.node_enriched[v] = any = true;
    if (!any)
      for (int e = 0; e < ne; ++e)
        if (p.tip_adjacent[e])
          for (int v : mesh.elements[e]) p.node_enriched[v] = true;
  }
  for (int e = 0; e < ne; ++e) {
    int c = 0;
    for (int v : mesh.elements[e]) c += p.node_enriched[v] ? 1 : 0;
    p.enriched_count[e] = c;
  }
  return p;
}

}  // namespace xvem
