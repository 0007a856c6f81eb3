#pragma once

/** @file vtk.hpp
 *  @brief Legacy ASCII VTK export of a discrete solution.
 */

#include <string>

#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"

namespace pfecc {

/** Writes an unstructured-grid file over the triangles linking cell centers
 *  and mesh vertices: velocity as point vectors, pressure as cell scalars
 *  taken from the dual cell each triangle sits in.
 */
void write_vtk(const MeshSet& meshes, const DiscreteVelocity& u, const DiscretePressure& p,
               const std::string& path);

}  // namespace pfecc
