#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "xvem/mesh.hpp"

using namespace xvem;

namespace {

void expect_element_invariants(const PolygonalMesh& mesh) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto g = element_geometry(mesh, e);
    EXPECT_GT(g.area, 0.0);
    Vec2 closure = Vec2::Zero();
    for (std::size_t k = 0; k < g.normals.size(); ++k) {
      EXPECT_NEAR(g.normals[k].norm(), 1.0, 1e-14);
      EXPECT_GE(g.diameter, g.lengths[k] * (1.0 - 1e-14));
      closure += g.lengths[k] * g.normals[k];
    }
    EXPECT_LT(closure.norm(), 1e-13 * std::max(1.0, g.diameter));
  }
}

double total_area(const PolygonalMesh& mesh) {
  double a = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) a += element_geometry(mesh, e).area;
  return a;
}

}  // namespace

TEST(Mesh, StructuredQuadCountsAndTags) {
  Rectangle dom{-1, -1, 1, 1};
  auto mesh = build_structured_quad_mesh(dom, 4, 3);
  EXPECT_EQ(mesh.num_vertices(), 20);
  EXPECT_EQ(mesh.num_elements(), 12);
  EXPECT_NO_THROW(mesh.validate());
  expect_element_invariants(mesh);
  EXPECT_NEAR(total_area(mesh), 4.0, 1e-14);
  EXPECT_NEAR(mesh.max_diameter(), std::hypot(0.5, 2.0 / 3.0), 1e-14);
  int tagged = 0;
  for (const auto& b : mesh.boundary_edges) tagged += !b.tag.empty();
  EXPECT_EQ(tagged, 14);
}

TEST(Mesh, StructuredQuadRejectsBadInput) {
  EXPECT_ANY_THROW(build_structured_quad_mesh({0, 0, 1, 1}, 0, 3));
  EXPECT_ANY_THROW(build_structured_quad_mesh({0, 0, 0, 1}, 2, 2));
}

TEST(Mesh, VoronoiIsValidDeterministicAndCoversDomain) {
  Rectangle dom{0, 0, 2, 1};
  auto a = build_voronoi_mesh(dom, 40, 11);
  auto b = build_voronoi_mesh(dom, 40, 11);
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.num_elements(), 40);
  expect_element_invariants(a);
  EXPECT_NEAR(total_area(a), 2.0, 1e-12);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (int i = 0; i < a.num_vertices(); ++i) EXPECT_EQ(a.vertices[i], b.vertices[i]);
  auto c = build_voronoi_mesh(dom, 40, 12);
  bool differs = c.num_vertices() != a.num_vertices();
  for (int i = 0; !differs && i < a.num_vertices(); ++i) differs = c.vertices[i] != a.vertices[i];
  EXPECT_TRUE(differs);
}

TEST(Mesh, MirroredVoronoiHasMirrorLineOnEdges) {
  Rectangle dom{-1, -1, 1, 1};
  auto mesh = build_mirrored_voronoi_mesh(dom, 0.0, 16, 7);
  EXPECT_NO_THROW(mesh.validate());
  EXPECT_EQ(mesh.num_elements(), 32);
  EXPECT_NEAR(total_area(mesh), 4.0, 1e-12);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    bool up = false, down = false;
    for (int v : mesh.elements[e]) {
      up = up || mesh.vertices[v].y() > 1e-12;
      down = down || mesh.vertices[v].y() < -1e-12;
    }
    EXPECT_FALSE(up && down) << "element " << e << " straddles the mirror line";
  }
}

TEST(Mesh, InsertVertexSplitsSharedEdge) {
  auto mesh = build_structured_quad_mesh({0, 0, 2, 1}, 2, 1);
  const int n0 = mesh.num_vertices();
  int v = insert_vertex(mesh, Vec2(1.0, 0.5));
  EXPECT_EQ(v, n0);
  EXPECT_EQ(mesh.elements[0].size(), 5u);
  EXPECT_EQ(mesh.elements[1].size(), 5u);
  EXPECT_NO_THROW(mesh.validate());
  EXPECT_EQ(insert_vertex(mesh, Vec2(1.0, 0.5)), v);
  EXPECT_ANY_THROW(insert_vertex(mesh, Vec2(0.5, 0.5)));
}

TEST(Mesh, RegularityReport) {
  auto mesh = build_structured_quad_mesh({0, 0, 1, 1}, 3, 3);
  auto rep = check_mesh_regularity(mesh, 0.3);
  EXPECT_TRUE(rep.passed());
  for (double r : rep.min_edge_ratio) EXPECT_NEAR(r, 1.0 / std::sqrt(2.0), 1e-12);
  for (double r : rep.kernel_disk_ratio) EXPECT_NEAR(r, 0.5 / std::sqrt(2.0), 1e-9);
  EXPECT_FALSE(check_mesh_regularity(mesh, 0.9).passed());
}

TEST(Mesh, KernelDiskOfNonConvexPolygon) {
  // L-shape: the kernel is the unit square corner region [0,1]^2.
  std::vector<Vec2> L = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  EXPECT_NEAR(kernel_disk_radius(L), 0.5, 1e-9);
  EXPECT_NEAR(kernel_disk_radius(fixtures::unit_square()), 0.5, 1e-9);
}

TEST(Mesh, ClipConvexPolygon) {
  auto half = clip_convex_polygon(fixtures::unit_square(), Vec2(1, 0), 0.25);
  EXPECT_NEAR(polygon_geometry(half).area, 0.25, 1e-15);
}

TEST(Mesh, JsonRoundTrip) {
  auto mesh = build_voronoi_mesh({0, 0, 1, 1}, 12, 3);
  auto back = mesh_from_json_string(mesh_to_json_string(mesh));
  ASSERT_EQ(back.num_vertices(), mesh.num_vertices());
  ASSERT_EQ(back.elements, mesh.elements);
  for (int i = 0; i < mesh.num_vertices(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
  ASSERT_EQ(back.boundary_edges.size(), mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) EXPECT_EQ(back.boundary_edges[i].tag, mesh.boundary_edges[i].tag);
  EXPECT_ANY_THROW(mesh_from_json_string("{\"vertices\": [[0,0]], \"elements\": [[0,1,2]]}"));
}

TEST(Mesh, RandomPolygonGeometryProperties) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto loop = fixtures::random_convex_polygon(rng);
    auto g = polygon_geometry(loop);
    Vec2 closure = Vec2::Zero();
    for (std::size_t k = 0; k < loop.size(); ++k) closure += g.lengths[k] * g.normals[k];
    EXPECT_LT(closure.norm(), 1e-13 * g.diameter);
    EXPECT_GT(g.area, 0.0);
  }
}
