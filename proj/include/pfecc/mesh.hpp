#pragma once

/** @file mesh.hpp
 *  @brief Three nested meshes: primal polygonal cells, dual cells around
 *         vertices, and the per-edge sub-triangle mesh that carries the
 *         discrete operators.
 *
 *  All meshes are immutable after construction; builders validate and throw
 *  pfecc::Error on defects, naming the offending entity.
 */

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfecc/geom.hpp"

namespace pfecc {

/// Polygonal cells with counter-clockwise vertex loops. Cell centers are area
/// centroids and are verified to lie strictly inside their cell.
struct PrimalMesh {
    struct Edge {
        int v0 = -1;       ///< endpoints; (v0, v1) runs CCW in cell k
        int v1 = -1;
        int k = -1;        ///< cell on the left of (v0, v1)
        int l = -1;        ///< cell on the right, -1 on the domain boundary
        bool boundary() const { return l < 0; }
    };

    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> cells;      ///< CCW vertex ids per cell
    std::vector<Vec2> centers;                ///< x_K, area centroid
    std::vector<double> cell_areas;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> cell_edges; ///< edge ids in loop order per cell
    std::vector<bool> vertex_on_boundary;
    double domain_area = 0.0;
    int n_interior_edges = 0;
    int n_boundary_edges = 0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Dual cells: one per primal vertex, bounded by cell centers and edge points.
/// Pressure unknowns live on the interior ones.
struct DualMesh {
    /// Incident edges and cells around a vertex in CCW angular order. For a
    /// boundary vertex the edge list starts and ends with the two boundary
    /// edges and cells[i] sits between edges[i] and edges[i+1]; for an
    /// interior vertex the lists are cyclic with cells[i] between edges[i]
    /// and edges[(i+1) % size].
    struct Umbrella {
        std::vector<int> edges;
        std::vector<int> cells;
    };

    std::vector<Umbrella> umbrellas;
    std::vector<bool> on_boundary;
    std::vector<double> areas;        ///< m(K*), from the dual polygon
    std::vector<int> interior_ids;    ///< vertices whose dual cell carries unknowns
    double area_sum = 0.0;            ///< tiles the domain: equals the primal area

    int n_duals() const { return static_cast<int>(areas.size()); }
    int n_interior() const { return static_cast<int>(interior_ids.size()); }
};

/// One of the two halves of an edge triangle: (x_vertex, x_cell, x_sigma).
/// Normals are outward for this half, scaled by the edge length; the gradient
/// formula pairs each nodal value with the normal of the opposite edge.
struct HalfTri {
    int cell = -1;
    double area = 0.0;
    Vec2 n_vertex_cell{};   ///< edge [x_vertex, x_cell], opposite x_sigma
    Vec2 n_cell_sigma{};    ///< edge [x_cell, x_sigma], opposite x_vertex (dual boundary)
    Vec2 n_sigma_vertex{};  ///< edge [x_sigma, x_vertex], opposite x_cell
};

/// Sub-triangle pair attached to one (edge, endpoint-vertex) incidence. For an
/// interior edge both halves exist and share x_sigma, the intersection of
/// [x_k, x_l] with the edge. A boundary edge contributes only the k-half, with
/// x_sigma at the edge midpoint and the edge-point value pinned to zero.
struct SubTri {
    int edge = -1;
    int vertex = -1;              ///< owning dual cell
    int k = -1;
    int l = -1;                   ///< -1 for boundary edges
    Vec2 x_k{}, x_l{}, x_vertex{}, x_sigma{};
    double sigma_coord = 0.0;     ///< position of x_sigma along the edge (v0 -> v1)
    HalfTri half_k{};
    std::optional<HalfTri> half_l{};

    bool interior() const { return l >= 0; }
};

/// Sub-triangle mesh grouped by dual cell, plus the conforming P1 triangulation
/// (nodes = cell centers then vertices) used for interpolation-based norms.
struct TriMesh {
    std::vector<SubTri> tris;
    std::vector<std::vector<int>> by_dual;      ///< owned SubTri indices per vertex
    std::vector<int> dual_edge_count;           ///< boundary segment count per dual cell
    double h = 0.0;                             ///< max circumscribed-circle diameter
    std::vector<std::array<int, 3>> p1_elements;

    int p1_node(int n_cells, bool is_vertex, int id) const {
        return is_vertex ? n_cells + id : id;
    }
};

/// Shape constants reported by check-mesh and the regularity tests.
struct RegularityReport {
    double h = 0.0;
    double c1 = 0.0;        ///< max boundary segment count over dual cells
    double c2 = 0.0;        ///< max diam(K*)^2 / m(K*)
    double c3 = 0.0;        ///< max circumdiameter(T)^2 / m(T) over elements
    double zeta = 0.0;      ///< h / min circumdiameter(T)
    double min_angle = 0.0; ///< radians, over sub-triangle halves
    int n_cells = 0;
    int n_vertices = 0;
    int n_edges = 0;
    int n_interior_duals = 0;
};

/// Everything the discrete operators need, built in one pass.
struct MeshSet {
    PrimalMesh primal;
    DualMesh dual;
    TriMesh tri;
};

PrimalMesh build_primal(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells);
DualMesh build_dual(const PrimalMesh& primal);
TriMesh build_third(const PrimalMesh& primal, const DualMesh& dual);
MeshSet build_meshes(PrimalMesh primal);

RegularityReport regularity_report(const MeshSet& meshes);

/// Splits every cell into congruent children: triangles via edge midpoints,
/// quads via midpoints plus the centroid, larger polygons via a centroid fan
/// of quads (one per corner). Mesh size halves for triangles and quads.
PrimalMesh refine_uniform(const PrimalMesh& primal);

/// n-by-n structured quad mesh of the unit square.
PrimalMesh make_quad_mesh(int n);

/// Text format: header `nv nc`, nv lines `x y`, nc lines `k i1 ... ik` with
/// 0-based CCW vertex ids. Full-line '#' comments and blank lines are skipped.
PrimalMesh load_mesh(std::istream& in);
PrimalMesh load_mesh_file(const std::string& path);
void save_mesh(const PrimalMesh& mesh, std::ostream& out);
void save_mesh_file(const PrimalMesh& mesh, const std::string& path);

}  // namespace pfecc
