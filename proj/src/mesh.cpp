#include "xvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace xvem {

std::vector<Vec2> PolygonalMesh::element_loop(int e) const {
  std::vector<Vec2> loop;
  loop.reserve(elements[e].size());
  for (int v : elements[e]) loop.push_back(vertices[v]);
  return loop;
}

double PolygonalMesh::max_diameter() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) h = std::max(h, polygon_geometry(element_loop(e)).diameter);
  return h;
}

void PolygonalMesh::validate() const {
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;  // (min,max) -> (elem, dir)
  for (int e = 0; e < num_elements(); ++e) {
    const auto& loop = elements[e];
    const int n = static_cast<int>(loop.size());
    if (n < 3) throw MeshError("element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= num_vertices())
        throw MeshError("element " + std::to_string(e) + " references a missing vertex");
    if (polygon_geometry(element_loop(e)).area <= 0.0)
      throw MeshError("element " + std::to_string(e) + " is not counter-clockwise");
    for (int k = 0; k < n; ++k) {
      int a = loop[k], b = loop[(k + 1) % n];
      if (a == b) throw MeshError("element " + std::to_string(e) + " has a repeated vertex");
      edges[{std::min(a, b), std::max(a, b)}].push_back({e, a < b ? 1 : -1});
    }
  }
  std::map<std::pair<int, int>, int> tagged;
  for (const auto& be : boundary_edges) {
    const auto& loop = elements.at(be.element);
    int n = static_cast<int>(loop.size());
    int a = loop.at(be.local_edge), b = loop[(be.local_edge + 1) % n];
    tagged[{std::min(a, b), std::max(a, b)}]++;
  }
  for (const auto& [key, users] : edges) {
    if (users.size() > 2) throw MeshError("edge shared by more than two elements");
    if (users.size() == 2 && users[0].second == users[1].second)
      throw MeshError("edge shared with the same orientation");
    if (users.size() == 2 && tagged.count(key)) throw MeshError("interior edge tagged as boundary");
    if (users.size() == 1 && !boundary_edges.empty() && !tagged.count(key))
      throw MeshError("boundary edge without a tag");
  }
}

ElementGeometry polygon_geometry(std::span<const Vec2> loop) {
  ElementGeometry g;
  const int n = static_cast<int>(loop.size());
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2& p = loop[i];
    const Vec2& q = loop[(i + 1) % n];
    double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  g.area = 0.5 * a2;
  g.centroid = c / (3.0 * a2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.diameter = std::max(g.diameter, (loop[i] - loop[j]).norm());
  g.normals.resize(n);
  g.lengths.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec2 d = loop[(i + 1) % n] - loop[i];
    g.lengths[i] = d.norm();
    g.normals[i] = Vec2(d.y(), -d.x()) / g.lengths[i];
  }
  return g;
}

ElementGeometry element_geometry(const PolygonalMesh& mesh, int e) {
  return polygon_geometry(mesh.element_loop(e));
}

PolygonalMesh build_structured_quad_mesh(const Rectangle& domain, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured mesh: nx and ny must be >= 1");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
    throw std::invalid_argument("structured mesh: empty domain");
  PolygonalMesh mesh;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double x = i == nx ? domain.x1 : domain.x0 + domain.width() * i / nx;
      double y = j == ny ? domain.y1 : domain.y0 + domain.height() * j / ny;
      mesh.vertices.emplace_back(x, y);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int e = static_cast<int>(mesh.elements.size());
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      if (j == 0) mesh.boundary_edges.push_back({e, 0, "bottom"});
      if (i == nx - 1) mesh.boundary_edges.push_back({e, 1, "right"});
      if (j == ny - 1) mesh.boundary_edges.push_back({e, 2, "top"});
      if (i == 0) mesh.boundary_edges.push_back({e, 3, "left"});
    }
  return mesh;
}

void tag_rectangle_boundary(PolygonalMesh& mesh, const Rectangle& domain) {
  mesh.boundary_edges.clear();
  std::map<std::pair<int, int>, int> count;
  for (const auto& loop : mesh.elements)
    for (std::size_t k = 0; k < loop.size(); ++k) {
      int a = loop[k], b = loop[(k + 1) % loop.size()];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  const double tol = 1e-10 * domain.diameter();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& loop = mesh.elements[e];
    const int n = static_cast<int>(loop.size());
    for (int k = 0; k < n; ++k) {
      int a = loop[k], b = loop[(k + 1) % n];
      if (count[{std::min(a, b), std::max(a, b)}] != 1) continue;
      const Vec2 &p = mesh.vertices[a], &q = mesh.vertices[b];
      std::string tag = "boundary";
      if (std::abs(p.y() - domain.y0) < tol && std::abs(q.y() - domain.y0) < tol)
        tag = "bottom";
      else if (std::abs(p.x() - domain.x1) < tol && std::abs(q.x() - domain.x1) < tol)
        tag = "right";
      else if (std::abs(p.y() - domain.y1) < tol && std::abs(q.y() - domain.y1) < tol)
        tag = "top";
      else if (std::abs(p.x() - domain.x0) < tol && std::abs(q.x() - domain.x0) < tol)
        tag = "left";
      mesh.boundary_edges.push_back({e, k, tag});
    }
  }
}

void deduplicate_vertices(PolygonalMesh& mesh, double rel_tol) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : mesh.vertices) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const double tol = rel_tol * std::hypot(xmax - xmin, ymax - ymin);
  const double cell = std::max(tol, 1e-300) * 4.0;
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 1000003LL) ^ std::hash<long long>()(k.second);
    }
  };
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, KeyHash> grid;
  std::vector<int> remap(mesh.vertices.size());
  std::vector<Vec2> kept;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec2& v = mesh.vertices[i];
    long long ix = static_cast<long long>(std::floor((v.x() - xmin) / cell));
    long long iy = static_cast<long long>(std::floor((v.y() - ymin) / cell));
    int found = -1;
    for (long long dx = -1; dx <= 1 && found < 0; ++dx)
      for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
        auto it = grid.find({ix + dx, iy + dy});
        if (it == grid.end()) continue;
        for (int k : it->second)
          if ((kept[k] - v).norm() <= tol) {
            found = k;
            break;
          }
      }
    if (found < 0) {
      found = static_cast<int>(kept.size());
      kept.push_back(v);
      grid[{ix, iy}].push_back(found);
    }
    remap[i] = found;
  }
  bool changed_loops = false;
  for (auto& loop : mesh.elements) {
    std::vector<int> out;
    for (int v : loop) {
      int w = remap[v];
      if (out.empty() || out.back() != w) out.push_back(w);
    }
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    if (out.size() != loop.size()) changed_loops = true;
    loop = std::move(out);
  }
  mesh.vertices = std::move(kept);
  if (changed_loops) mesh.boundary_edges.clear();
}

int insert_vertex(PolygonalMesh& mesh, const Vec2& p, double tol) {
  double diam = 0.0;
  {
    Vec2 lo = mesh.vertices.front(), hi = lo;
    for (const auto& v : mesh.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    diam = (hi - lo).norm();
  }
  const double abs_tol = tol * diam;
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if ((mesh.vertices[i] - p).norm() <= abs_tol) return i;
  const int id = mesh.num_vertices();
  bool inserted = false;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto& loop = mesh.elements[e];
    const int n = static_cast<int>(loop.size());
    for (int k = 0; k < n; ++k) {
      const Vec2& a = mesh.vertices[loop[k]];
      const Vec2& b = mesh.vertices[loop[(k + 1) % n]];
      Vec2 d = b - a;
      double s = (p - a).dot(d) / d.squaredNorm();
      if (s <= 0.0 || s >= 1.0) continue;
      if ((a + s * d - p).norm() > abs_tol) continue;
      loop.insert(loop.begin() + k + 1, id);
      std::vector<BoundaryEdge> extra;
      for (auto& be : mesh.boundary_edges) {
        if (be.element != e) continue;
        if (be.local_edge > k)
          ++be.local_edge;
        else if (be.local_edge == k)
          extra.push_back({e, k + 1, be.tag});
      }
      mesh.boundary_edges.insert(mesh.boundary_edges.end(), extra.begin(), extra.end());
      inserted = true;
      break;
    }
  }
  if (!inserted) throw std::invalid_argument("insert_vertex: point lies on no mesh edge");
  mesh.vertices.push_back(p);
  return id;
}

std::vector<Vec2> clip_convex_polygon(const std::vector<Vec2>& poly, const Vec2& n, double c) {
  std::vector<Vec2> out;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    double fp = n.dot(p) - c, fq = n.dot(q) - c;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + fp / (fp - fq) * (q - p));
  }
  return out;
}

namespace {

double chebyshev_radius(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  if (m < 3) return 0.0;
  std::vector<Vec2> nrm(m);
  std::vector<double> off(m);
  for (int i = 0; i < m; ++i) {
    Vec2 d = poly[(i + 1) % m] - poly[i];
    double L = d.norm();
    if (L == 0.0) {
      nrm[i] = Vec2::Zero();
      off[i] = 0.0;
      continue;
    }
    nrm[i] = Vec2(d.y(), -d.x()) / L;  // outward for a CCW loop
    off[i] = nrm[i].dot(poly[i]);
  }
  double scale = 0.0;
  for (const auto& p : poly) scale = std::max(scale, p.norm());
  const double ftol = 1e-12 * std::max(scale, 1.0);
  double best = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        Eigen::Matrix3d A;
        A << nrm[i].x(), nrm[i].y(), 1.0, nrm[j].x(), nrm[j].y(), 1.0, nrm[k].x(), nrm[k].y(), 1.0;
        if (std::abs(A.determinant()) < 1e-14) continue;
        Eigen::Vector3d sol = A.partialPivLu().solve(Eigen::Vector3d(off[i], off[j], off[k]));
        if (sol.z() <= best) continue;
        bool ok = true;
        for (int q = 0; q < m && ok; ++q)
          if (nrm[q].dot(sol.head<2>()) + sol.z() > off[q] + ftol) ok = false;
        if (ok) best = sol.z();
      }
  return best;
}

}  // namespace

double kernel_disk_radius(std::span<const Vec2> loop) {
  Vec2 lo = loop.front(), hi = lo;
  for (const auto& v : loop) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<Vec2> kernel = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n && kernel.size() >= 3; ++i) {
    Vec2 d = loop[(i + 1) % n] - loop[i];
    Vec2 out(d.y(), -d.x());
    kernel = clip_convex_polygon(kernel, out, out.dot(loop[i]));
  }
  return chebyshev_radius(kernel);
}

RegularityReport check_mesh_regularity(const PolygonalMesh& mesh, double rho) {
  RegularityReport rep;
  rep.rho = rho;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto loop = mesh.element_loop(e);
    auto g = polygon_geometry(loop);
    double min_edge = *std::min_element(g.lengths.begin(), g.lengths.end());
    double er = min_edge / g.diameter;
    double kr = kernel_disk_radius(loop) / g.diameter;
    rep.min_edge_ratio.push_back(er);
    rep.kernel_disk_ratio.push_back(kr);
    if (er < rho || kr < rho) rep.violators.push_back(e);
  }
  return rep;
}

}  // namespace xvem
