#include <fstream>
#include <json.hpp>
#include <sstream>

#include "xvem/mesh.hpp"

namespace xvem {

std::string mesh_to_json_string(const PolygonalMesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["elements"] = mesh.elements;
  j["boundary_tags"] = nlohmann::json::array();
  for (const auto& be : mesh.boundary_edges)
    j["boundary_tags"].push_back({{"element", be.element}, {"local_edge", be.local_edge}, {"tag", be.tag}});
  return j.dump(1);
}

PolygonalMesh mesh_from_json_string(const std::string& text) {
  PolygonalMesh mesh;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    for (const auto& v : j.at("vertices")) mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    mesh.elements = j.at("elements").get<std::vector<std::vector<int>>>();
    if (j.contains("boundary_tags"))
      for (const auto& b : j.at("boundary_tags"))
        mesh.boundary_edges.push_back(
            {b.at("element").get<int>(), b.at("local_edge").get<int>(), b.at("tag").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mesh file: ") + e.what());
  }
  for (const auto& be : mesh.boundary_edges)
    if (be.element < 0 || be.element >= mesh.num_elements() || be.local_edge < 0 ||
        be.local_edge >= static_cast<int>(mesh.elements[be.element].size()))
      throw std::invalid_argument("mesh file: boundary tag out of range");
  mesh.validate();
  return mesh;
}

void write_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << mesh_to_json_string(mesh) << "\n";
}

PolygonalMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return mesh_from_json_string(ss.str());
}

}  // namespace xvem
