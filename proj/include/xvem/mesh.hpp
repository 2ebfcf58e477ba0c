#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xvem/common.hpp"

namespace xvem {

struct Rectangle {
  double x0, y0, x1, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double diameter() const { return std::hypot(width(), height()); }
};

// A boundary edge of the mesh: local edge k of element e runs from vertex k to vertex k+1.
struct BoundaryEdge {
  int element;
  int local_edge;
  std::string tag;
};

struct PolygonalMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> elements;  // counter-clockwise vertex loops
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  std::vector<Vec2> element_loop(int e) const;
  double max_diameter() const;

  // Conformity: every edge is shared by at most two elements with opposite orientation,
  // every unshared edge is listed as a boundary edge, and all loops are counter-clockwise.
  void validate() const;
};

struct ElementGeometry {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
  double diameter = 0.0;
  std::vector<Vec2> normals;  // outward unit normal of edge k
  std::vector<double> lengths;
};

ElementGeometry polygon_geometry(std::span<const Vec2> loop);
ElementGeometry element_geometry(const PolygonalMesh& mesh, int e);

PolygonalMesh build_structured_quad_mesh(const Rectangle& domain, int nx, int ny);

struct VoronoiOptions {
  int lloyd_iterations = 50;
};

PolygonalMesh build_voronoi_mesh(const Rectangle& domain, int n_seeds, std::uint64_t rng_seed,
                                 const VoronoiOptions& options = {});
PolygonalMesh build_voronoi_mesh(const Rectangle& domain, const std::vector<Vec2>& seeds,
                                 const VoronoiOptions& options = {});

// Voronoi mesh of the half y >= mirror_y of the domain, reflected about y = mirror_y.
// The line y = mirror_y is then made of mesh edges.
PolygonalMesh build_mirrored_voronoi_mesh(const Rectangle& domain, double mirror_y, int n_half_seeds,
                                          std::uint64_t rng_seed, const VoronoiOptions& options = {});

// Make p a mesh vertex: returns an existing vertex within tol, otherwise splits the edge
// containing p (in every element that uses it). Throws if p is on no edge.
int insert_vertex(PolygonalMesh& mesh, const Vec2& p, double tol = 1e-12);

// Merge vertices closer than tol * domain diameter and drop repeated loop entries.
void deduplicate_vertices(PolygonalMesh& mesh, double rel_tol = 1e-12);

// Tag boundary edges of a rectangular domain by side: bottom, right, top, left.
void tag_rectangle_boundary(PolygonalMesh& mesh, const Rectangle& domain);

struct RegularityReport {
  double rho = 0.0;
  std::vector<double> min_edge_ratio;     // min h_E / h_P per element
  std::vector<double> kernel_disk_ratio;  // radius of the largest disk in the kernel / h_P
  std::vector<int> violators;
  bool passed() const { return violators.empty(); }
};

RegularityReport check_mesh_regularity(const PolygonalMesh& mesh, double rho);

// Sutherland-Hodgman clip of a convex polygon by the half-plane n.x <= c.
std::vector<Vec2> clip_convex_polygon(const std::vector<Vec2>& poly, const Vec2& n, double c);

// Largest disk radius inside the kernel (visibility region) of a simple polygon.
double kernel_disk_radius(std::span<const Vec2> loop);

// JSON file with keys vertices, elements, boundary_tags.
void write_mesh(const PolygonalMesh& mesh, const std::string& path);
PolygonalMesh read_mesh(const std::string& path);
std::string mesh_to_json_string(const PolygonalMesh& mesh);
PolygonalMesh mesh_from_json_string(const std::string& text);

}  // namespace xvem
