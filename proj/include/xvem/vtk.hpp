#pragma once

#include <string>

#include "xvem/system.hpp"

namespace xvem {

// Legacy ASCII polydata: one point per node copy, one polygon per element (using the copies
// on the side of its centroid), point vectors "displacement" with the enrichment included.
std::string vtk_polydata(const Model& model, const Vector& u);
void write_vtk(const Model& model, const Vector& u, const std::string& path);

}  // namespace xvem
