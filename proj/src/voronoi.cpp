#include <algorithm>
#include <cmath>
#include <random>

#include "xvem/mesh.hpp"

namespace xvem {

namespace {

// Bucket grid over the domain for nearest-seed sweeps.
class SeedGrid {
 public:
  SeedGrid(const Rectangle& dom, const std::vector<Vec2>& seeds) : dom_(dom), seeds_(seeds) {
    const int n = static_cast<int>(seeds.size());
    const double aspect = dom.width() / dom.height();
    nx_ = std::max(1, static_cast<int>(std::sqrt(n * aspect)));
    ny_ = std::max(1, static_cast<int>(std::sqrt(n / aspect)));
    cell_ = std::max(dom.width() / nx_, dom.height() / ny_);
    nx_ = static_cast<int>(std::ceil(dom.width() / cell_));
    ny_ = static_cast<int>(std::ceil(dom.height() / cell_));
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int i = 0; i < n; ++i) {
      auto [cx, cy] = cell_of(seeds[i]);
      buckets_[cy * nx_ + cx].push_back(i);
    }
  }

  std::pair<int, int> cell_of(const Vec2& p) const {
    int cx = std::clamp(static_cast<int>((p.x() - dom_.x0) / cell_), 0, nx_ - 1);
    int cy = std::clamp(static_cast<int>((p.y() - dom_.y0) / cell_), 0, ny_ - 1);
    return {cx, cy};
  }

  // Voronoi cell of seed i clipped to the domain.
  std::vector<Vec2> cell(int i) const {
    const Vec2& s = seeds_[i];
    std::vector<Vec2> poly = {{dom_.x0, dom_.y0}, {dom_.x1, dom_.y0}, {dom_.x1, dom_.y1}, {dom_.x0, dom_.y1}};
    auto [cx, cy] = cell_of(s);
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int jy = cy - ring; jy <= cy + ring; ++jy)
        for (int jx = cx - ring; jx <= cx + ring; ++jx) {
          if (std::max(std::abs(jx - cx), std::abs(jy - cy)) != ring) continue;
          if (jx < 0 || jy < 0 || jx >= nx_ || jy >= ny_) continue;
          for (int j : buckets_[jy * nx_ + jx]) {
            if (j == i) continue;
            Vec2 d = seeds_[j] - s;
            poly = clip_convex_polygon(poly, d, 0.5 * (seeds_[j].squaredNorm() - s.squaredNorm()));
          }
        }
      double radius = 0.0;
      for (const auto& p : poly) radius = std::max(radius, (p - s).norm());
      if (ring * cell_ >= 2.0 * radius) break;
    }
    return poly;
  }

 private:
  Rectangle dom_;
  const std::vector<Vec2>& seeds_;
  int nx_ = 1, ny_ = 1;
  double cell_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

void check_seeds(const Rectangle& dom, const std::vector<Vec2>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("voronoi: no seeds");
  const double tol = 1e-12 * dom.diameter();
  std::vector<std::size_t> order(seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return seeds[a].x() < seeds[b].x(); });
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t m = k + 1; m < order.size(); ++m) {
      if (seeds[order[m]].x() - seeds[order[k]].x() > tol) break;
      if ((seeds[order[m]] - seeds[order[k]]).norm() <= tol)
        throw GenerationFailure("voronoi: coincident seeds");
    }
  for (const auto& s : seeds)
    if (s.x() < dom.x0 || s.x() > dom.x1 || s.y() < dom.y0 || s.y() > dom.y1)
      throw std::invalid_argument("voronoi: seed outside the domain");
}

std::vector<std::vector<Vec2>> relaxed_cells(const Rectangle& dom, std::vector<Vec2> seeds,
                                             const VoronoiOptions& opt) {
  check_seeds(dom, seeds);
  std::vector<std::vector<Vec2>> cells(seeds.size());
  for (int it = 0; it <= opt.lloyd_iterations; ++it) {
    SeedGrid grid(dom, seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cells[i] = grid.cell(static_cast<int>(i));
      if (cells[i].size() < 3) throw GenerationFailure("voronoi: degenerate cell");
    }
    if (it == opt.lloyd_iterations) break;
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_geometry(cells[i]).centroid;
    check_seeds(dom, seeds);
  }
  return cells;
}

PolygonalMesh cells_to_mesh(const std::vector<std::vector<Vec2>>& cells) {
  PolygonalMesh mesh;
  for (const auto& c : cells) {
    std::vector<int> loop;
    for (const auto& p : c) {
      loop.push_back(mesh.num_vertices());
      mesh.vertices.push_back(p);
    }
    mesh.elements.push_back(loop);
  }
  deduplicate_vertices(mesh, 1e-12);
  return mesh;
}

std::vector<Vec2> random_seeds(const Rectangle& dom, int n, std::uint64_t rng_seed) {
  if (n < 1) throw std::invalid_argument("voronoi: n_seeds must be >= 1");
  std::mt19937_64 rng(rng_seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec2> seeds(n);
  for (auto& s : seeds) {
    double u = uniform(), v = uniform();
    s = Vec2(dom.x0 + u * dom.width(), dom.y0 + v * dom.height());
  }
  return seeds;
}

}  // namespace

PolygonalMesh build_voronoi_mesh(const Rectangle& domain, const std::vector<Vec2>& seeds,
                                 const VoronoiOptions& options) {
  auto mesh = cells_to_mesh(relaxed_cells(domain, seeds, options));
  tag_rectangle_boundary(mesh, domain);
  return mesh;
}

PolygonalMesh build_voronoi_mesh(const Rectangle& domain, int n_seeds, std::uint64_t rng_seed,
                                 const VoronoiOptions& options) {
  return build_voronoi_mesh(domain, random_seeds(domain, n_seeds, rng_seed), options);
}

PolygonalMesh build_mirrored_voronoi_mesh(const Rectangle& domain, double mirror_y, int n_half_seeds,
                                          std::uint64_t rng_seed, const VoronoiOptions& options) {
  if (std::abs((domain.y1 - mirror_y) - (mirror_y - domain.y0)) > 1e-12 * domain.diameter())
    throw std::invalid_argument("mirrored voronoi: mirror line must bisect the domain");
  Rectangle upper{domain.x0, mirror_y, domain.x1, domain.y1};
  auto cells = relaxed_cells(upper, random_seeds(upper, n_half_seeds, rng_seed), options);
  const std::size_t n = cells.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Vec2> m;
    for (auto it = cells[i].rbegin(); it != cells[i].rend(); ++it)
      m.emplace_back(it->x(), 2.0 * mirror_y - it->y());
    cells.push_back(m);
  }
  auto mesh = cells_to_mesh(cells);
  tag_rectangle_boundary(mesh, domain);
  return mesh;
}

}  // namespace xvem
