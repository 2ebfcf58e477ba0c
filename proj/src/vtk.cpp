#include "xvem/vtk.hpp"

#include <fstream>
#include <sstream>

namespace xvem {

std::string vtk_polydata(const Model& model, const Vector& u) {
  const PolygonalMesh& mesh = model.mesh;
  const int nv = mesh.num_vertices();
  if (u.size() != model.dofs.size) throw std::invalid_argument("vtk: solution size does not match the DOF map");
  std::vector<std::array<int, 2>> point_of(nv, {-1, -1});
  std::vector<Vec2> xs, ds;
  for (int v = 0; v < nv; ++v)
    for (int c = 0; c < model.dofs.copies(v); ++c) {
      const Vec2& x = mesh.vertices[v];
      Vec2 d(u(model.dofs.std_dof(v, c, 0)), u(model.dofs.std_dof(v, c, 1)));
      if (model.dofs.enriched[v]) {
        const Side s = c == 1 ? Side::minus : (model.dofs.copies(v) == 2 ? Side::plus
                                                : (signed_distance(*model.crack, x) >= 0.0 ? Side::plus : Side::minus));
        auto psi = model.enrichment->eval(x, s, false).value;
        d += u(model.dofs.enr_dof(v, c, 0)) * psi[0] + u(model.dofs.enr_dof(v, c, 1)) * psi[1];
      }
      point_of[v][c] = static_cast<int>(xs.size());
      xs.push_back(x);
      ds.push_back(d);
    }

  std::ostringstream os;
  os.precision(17);
  os << "# vtk DataFile Version 3.0\nxvem2d solution\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << xs.size() << " double\n";
  for (const auto& x : xs) os << x.x() << " " << x.y() << " 0\n";
  std::size_t total = 0;
  for (const auto& el : mesh.elements) total += el.size() + 1;
  os << "POLYGONS " << mesh.num_elements() << " " << total << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Side s = model.plan.element_side.empty() ? Side::plus : model.plan.element_side[e];
    os << mesh.elements[e].size();
    for (int v : mesh.elements[e]) os << " " << point_of[v][model.copy_of(v, s)];
    os << "\n";
  }
  os << "POINT_DATA " << xs.size() << "\nVECTORS displacement double\n";
  for (const auto& d : ds) os << d.x() << " " << d.y() << " 0\n";
  return os.str();
}

void write_vtk(const Model& model, const Vector& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << vtk_polydata(model, u);
}

}  // namespace xvem
