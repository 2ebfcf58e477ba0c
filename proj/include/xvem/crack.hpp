#pragma once

#include <optional>
#include <vector>

#include "xvem/common.hpp"
#include "xvem/mesh.hpp"

namespace xvem {

// Polyline crack; the last point is the tip. Frame at the tip: tangent t along the
// last segment, normal n = t rotated by +90 degrees. The + side is the side n points to.
class Crack {
 public:
  explicit Crack(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& tip() const { return points_.back(); }
  const Vec2& tangent() const { return t_; }
  const Vec2& normal() const { return n_; }
  double length() const { return length_; }

  // Coordinates in the tip frame.
  Vec2 to_local(const Vec2& x) const { return {t_.dot(x - tip()), n_.dot(x - tip())}; }
  // Rows are t and n: local = R (x - tip), local tensors R A R^T.
  Mat2 rotation() const;

  double distance(const Vec2& x) const;
  // Points closer than face_tol to the crack (and not at the tip) are on a face.
  bool on_faces(const Vec2& x) const;
  double face_tol() const { return 1e-10 * std::max(1.0, length_); }

 private:
  std::vector<Vec2> points_;
  Vec2 t_, n_;
  double length_ = 0.0;
};

double signed_distance(const Crack& crack, const Vec2& x);

struct PolarCoords {
  double r = 0.0;
  double theta = 0.0;
  bool degenerate = false;
};

// theta in (-pi, pi]; on the faces theta = pi unless a side is given. With a side, the
// branch of that side is continued across the crack line (theta beyond +-pi).
PolarCoords tip_polar_coords(const Crack& crack, const Vec2& x);
PolarCoords tip_polar_coords(const Crack& crack, const Vec2& x, Side side);

enum class EnrichmentMode { none, topological, geometric };
enum class ElementClass { uncut, cut, tip };

struct EnrichmentPlan {
  EnrichmentMode mode = EnrichmentMode::none;
  double radius = 0.0;
  std::vector<bool> node_enriched;
  std::vector<bool> node_doubled;   // carries a second copy of its DOFs
  std::vector<bool> node_on_crack;  // lies on a crack face behind the tip
  std::vector<ElementClass> element_class;
  std::vector<Side> element_side;  // side of the centroid
  std::vector<int> enriched_count;
  std::vector<bool> tip_adjacent;  // closure contains the tip
  bool tip_interior = true;        // false when the tip is on the outer boundary

  int num_enriched_nodes() const;
  bool element_enriched(int e) const { return enriched_count[e] > 0; }
};

// Plan for an uncracked mesh: nothing enriched, nothing doubled.
EnrichmentPlan empty_plan(const PolygonalMesh& mesh);

EnrichmentPlan classify_elements(const PolygonalMesh& mesh, const Crack& crack, EnrichmentMode mode,
                                 double radius);

// ---- splitting ----

struct SubVertex {
  Vec2 x;
  int parent_vertex = -1;  // local index if it coincides with a parent vertex
};

// A sub-polygon of a cut element. Edge k runs from vertex k to k+1; edge_parent[k] is the
// parent local edge it lies on, or -1 for a piece of the crack.
struct SubPolygon {
  Side side = Side::plus;
  std::vector<SubVertex> vertices;
  std::vector<int> edge_parent;
  std::vector<Vec2> loop() const;
};

struct SplitElement {
  int element = -1;
  SubPolygon plus, minus;
  std::vector<Vec2> crack_path;  // entry to exit, following the crack
  const SubPolygon& part(Side s) const { return s == Side::plus ? plus : minus; }
};

SplitElement split_element(const PolygonalMesh& mesh, int e, const Crack& crack);
// With tip_interior false a tip on the element boundary still allows a split.
SplitElement split_polygon(const std::vector<Vec2>& loop, const Crack& crack, bool tip_interior = true);

// Crack path through the element whose closure holds the tip: the boundary loop with the
// entry point (and the tip, when it is on the boundary) inserted, and the path entry -> tip.
struct TipSlit {
  std::vector<SubVertex> loop;  // counter-clockwise, parent vertices plus inserted points
  std::vector<int> edge_parent;
  std::vector<Vec2> path;  // entry ... tip
};

TipSlit tip_slit(const std::vector<Vec2>& loop, const Crack& crack);

// Relation of a polygon to the crack.
ElementClass relate_polygon(const std::vector<Vec2>& loop, const Crack& crack, bool tip_interior = true);

bool on_mesh_boundary(const PolygonalMesh& mesh, const Vec2& p, double tol);

// -1 outside, 0 on the boundary (within tol), 1 inside.
int point_in_polygon(const std::vector<Vec2>& loop, const Vec2& p, double tol);

}  // namespace xvem
