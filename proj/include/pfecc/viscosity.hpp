#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfecc/geom.hpp"
#include "pfecc/mesh.hpp"

namespace pfecc {

/// Scalar viscosity with declared bounds and Lipschitz constant. Cell
/// averages are produced by average_viscosity and cached per mesh.
struct ViscosityField {
    std::function<double(Vec2)> value;
    double lower = 0.0;  ///< declared lower bound (> 0)
    double upper = 0.0;  ///< declared upper bound
    double lipschitz = 0.0;

    double operator()(Vec2 x) const { return value(x); }
};

ViscosityField make_constant_viscosity(double v);
/// 1 + 0.5 sin(pi x) sin(pi y)
ViscosityField make_smooth_viscosity();
/// v1 for x < 0.5, v2 for x >= 0.5
ViscosityField make_jump_viscosity(double v1, double v2);

/// Parses a field id: "const:<v>", "smooth", or "jump:<v1>:<v2>".
ViscosityField parse_viscosity(const std::string& id);

/// Mean of mu over one cell: 3-point Gauss on a centroid fan, exact for
/// linear mu. Throws NonPositiveViscosity when a sample is <= 0.
double average_viscosity(const ViscosityField& field, const PrimalMesh& mesh, int cell);

/// Cell averages for the whole mesh, in cell order.
std::vector<double> cell_viscosities(const ViscosityField& field, const PrimalMesh& mesh);

}  // namespace pfecc
