#include "pfecc/vtk.hpp"

#include <cstdio>
#include <fstream>

#include "pfecc/errors.hpp"

namespace pfecc {

void write_vtk(const MeshSet& meshes, const DiscreteVelocity& u, const DiscretePressure& p,
               const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");

    const auto& primal = meshes.primal;
    const int nc = primal.n_cells();
    const int nv = primal.n_vertices();
    const auto& els = meshes.tri.p1_elements;

    char buf[128];
    auto line3 = [&](double a, double b, double c) {
        std::snprintf(buf, sizeof buf, "%.9e %.9e %.9e\n", a, b, c);
        out << buf;
    };

    out << "# vtk DataFile Version 3.0\n";
    out << "stokes cell-centered solution\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << nc + nv << " double\n";
    for (int k = 0; k < nc; ++k) {
        const Vec2 x = primal.centers[static_cast<std::size_t>(k)];
        line3(x.x, x.y, 0.0);
    }
    for (int v = 0; v < nv; ++v) {
        const Vec2 x = primal.vertices[static_cast<std::size_t>(v)];
        line3(x.x, x.y, 0.0);
    }

    out << "CELLS " << els.size() << ' ' << els.size() * 4 << '\n';
    for (const auto& el : els) {
        out << "3 " << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
    }
    out << "CELL_TYPES " << els.size() << '\n';
    for (std::size_t e = 0; e < els.size(); ++e) out << "5\n";

    out << "POINT_DATA " << nc + nv << '\n';
    out << "VECTORS velocity double\n";
    for (int k = 0; k < nc; ++k) {
        const Vec2 val = u.cell[static_cast<std::size_t>(k)];
        line3(val.x, val.y, 0.0);
    }
    for (int v = 0; v < nv; ++v) {
        const Vec2 val = u.vertex[static_cast<std::size_t>(v)];
        line3(val.x, val.y, 0.0);
    }

    out << "CELL_DATA " << els.size() << '\n';
    out << "SCALARS pressure double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (const auto& el : els) {
        // The first vertex node identifies the dual cell the triangle lies in.
        int parent = 0;
        for (int n : el) {
            if (n >= nc) {
                parent = n - nc;
                break;
            }
        }
        std::snprintf(buf, sizeof buf, "%.9e\n", p.dual[static_cast<std::size_t>(parent)]);
        out << buf;
    }

    if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

}  // namespace pfecc
