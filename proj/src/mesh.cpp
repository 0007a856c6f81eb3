#include "pfecc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "pfecc/errors.hpp"

namespace pfecc {

namespace {

std::string cell_name(int k) { return "cell " + std::to_string(k); }
std::string edge_name(int e) { return "edge " + std::to_string(e); }
std::string vertex_name(int v) { return "vertex " + std::to_string(v); }

}  // namespace

PrimalMesh build_primal(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells) {
    PrimalMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.cells = std::move(cells);

    const int nv = mesh.n_vertices();
    const int nc = mesh.n_cells();
    if (nc < 1) fail(ErrorKind::UsageError, "mesh must contain at least one cell");
    if (nv < 3) fail(ErrorKind::UsageError, "mesh must contain at least three vertices");

    mesh.centers.resize(nc);
    mesh.cell_areas.resize(nc);
    mesh.cell_edges.assign(nc, {});

    std::vector<Vec2> loop;
    for (int k = 0; k < nc; ++k) {
        const auto& ids = mesh.cells[k];
        if (ids.size() < 3) fail(ErrorKind::NonSimplePolygon, cell_name(k) + " has fewer than 3 vertices");
        loop.clear();
        for (int id : ids) {
            if (id < 0 || id >= nv) {
                fail(ErrorKind::UsageError,
                     cell_name(k) + " references vertex " + std::to_string(id) + " out of range");
            }
            loop.push_back(mesh.vertices[static_cast<std::size_t>(id)]);
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                if (ids[i] == ids[j]) {
                    fail(ErrorKind::NonSimplePolygon, cell_name(k) + " repeats vertex " + std::to_string(ids[i]));
                }
            }
        }

        const double signed_area = polygon_signed_area(loop);
        const double diam = polygon_diameter(loop);
        if (std::abs(signed_area) <= 1e-14 * diam * diam) {
            fail(ErrorKind::ZeroAreaCell, cell_name(k));
        }
        if (signed_area < 0.0) {
            fail(ErrorKind::NonSimplePolygon, cell_name(k) + " is not counter-clockwise");
        }
        if (polygon_self_intersects(loop)) {
            fail(ErrorKind::NonSimplePolygon, cell_name(k) + " self-intersects");
        }

        mesh.cell_areas[k] = signed_area;
        mesh.centers[k] = polygon_centroid(loop);
        if (!point_in_polygon(mesh.centers[k], loop)) {
            fail(ErrorKind::CellCenterOutside, cell_name(k));
        }
        mesh.domain_area += signed_area;
    }

    // Edge table: first traversal direction defines (v0, v1) and cell k; the
    // matching cell must traverse the edge in the opposite direction.
    std::map<std::pair<int, int>, int> edge_of;
    for (int k = 0; k < nc; ++k) {
        const auto& ids = mesh.cells[k];
        const std::size_t m = ids.size();
        mesh.cell_edges[k].resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const int a = ids[i];
            const int b = ids[(i + 1) % m];
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                PrimalMesh::Edge e;
                e.v0 = a;
                e.v1 = b;
                e.k = k;
                edge_of.emplace(key, mesh.n_edges());
                mesh.cell_edges[k][i] = mesh.n_edges();
                mesh.edges.push_back(e);
            } else {
                PrimalMesh::Edge& e = mesh.edges[static_cast<std::size_t>(it->second)];
                if (e.l >= 0) {
                    fail(ErrorKind::DanglingEdge, edge_name(it->second) + " shared by more than two cells");
                }
                if (!(e.v0 == b && e.v1 == a)) {
                    fail(ErrorKind::DanglingEdge,
                         edge_name(it->second) + " traversed twice in the same direction");
                }
                e.l = k;
                mesh.cell_edges[k][i] = it->second;
            }
        }
    }

    mesh.vertex_on_boundary.assign(nv, false);
    for (const auto& e : mesh.edges) {
        if (e.boundary()) {
            mesh.vertex_on_boundary[static_cast<std::size_t>(e.v0)] = true;
            mesh.vertex_on_boundary[static_cast<std::size_t>(e.v1)] = true;
            ++mesh.n_boundary_edges;
        } else {
            ++mesh.n_interior_edges;
        }
    }

    std::vector<bool> used(static_cast<std::size_t>(nv), false);
    for (const auto& ids : mesh.cells) {
        for (int id : ids) used[static_cast<std::size_t>(id)] = true;
    }
    for (int v = 0; v < nv; ++v) {
        if (!used[static_cast<std::size_t>(v)]) {
            fail(ErrorKind::DanglingEdge, vertex_name(v) + " belongs to no cell");
        }
    }

    return mesh;
}

DualMesh build_dual(const PrimalMesh& primal) {
    const int nv = primal.n_vertices();
    DualMesh dual;
    dual.umbrellas.resize(nv);
    dual.on_boundary = primal.vertex_on_boundary;
    dual.areas.assign(nv, 0.0);

    // Incident edges per vertex.
    std::vector<std::vector<int>> vertex_edges(static_cast<std::size_t>(nv));
    for (int e = 0; e < primal.n_edges(); ++e) {
        vertex_edges[static_cast<std::size_t>(primal.edges[e].v0)].push_back(e);
        vertex_edges[static_cast<std::size_t>(primal.edges[e].v1)].push_back(e);
    }

    // For each cell incident to v, the outgoing edge (v -> next loop vertex)
    // keyed for the angular walk; the cell covers the CCW wedge from its
    // outgoing edge to its incoming edge.
    struct Wedge {
        int cell;
        int incoming_edge;
    };

    for (int v = 0; v < nv; ++v) {
        auto& incident = vertex_edges[static_cast<std::size_t>(v)];
        if (incident.size() < 2) {
            fail(ErrorKind::DanglingEdge, vertex_name(v) + " has fewer than two incident edges");
        }

        int boundary_count = 0;
        for (int e : incident) {
            if (primal.edges[static_cast<std::size_t>(e)].boundary()) ++boundary_count;
        }
        const bool on_bdry = primal.vertex_on_boundary[static_cast<std::size_t>(v)];
        if ((on_bdry && boundary_count != 2) || (!on_bdry && boundary_count != 0)) {
            fail(ErrorKind::DanglingEdge,
                 vertex_name(v) + " has " + std::to_string(boundary_count) + " boundary edges");
        }

        // CCW angular order of the incident edges.
        const Vec2 p = primal.vertices[static_cast<std::size_t>(v)];
        auto other_end = [&](int e) {
            const auto& ed = primal.edges[static_cast<std::size_t>(e)];
            return ed.v0 == v ? ed.v1 : ed.v0;
        };
        std::vector<std::pair<double, int>> order;
        order.reserve(incident.size());
        for (int e : incident) {
            const Vec2 d = primal.vertices[static_cast<std::size_t>(other_end(e))] - p;
            order.emplace_back(std::atan2(d.y, d.x), e);
        }
        std::sort(order.begin(), order.end());
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (order[i].first == order[i - 1].first) {
                fail(ErrorKind::DanglingEdge,
                     vertex_name(v) + " has overlapping incident edges");
            }
        }

        // Wedge lookup: outgoing edge id -> (cell, incoming edge id).
        std::map<int, Wedge> wedge_of;
        auto add_wedge = [&](int cell) {
            const auto& ids = primal.cells[static_cast<std::size_t>(cell)];
            const std::size_t m = ids.size();
            for (std::size_t i = 0; i < m; ++i) {
                if (ids[i] != v) continue;
                const int e_out = primal.cell_edges[static_cast<std::size_t>(cell)][i];
                const int e_in = primal.cell_edges[static_cast<std::size_t>(cell)][(i + m - 1) % m];
                if (!wedge_of.emplace(e_out, Wedge{cell, e_in}).second) {
                    fail(ErrorKind::DanglingEdge, vertex_name(v) + " has conflicting cell wedges");
                }
                return;
            }
            fail(ErrorKind::DanglingEdge, cell_name(cell) + " missing " + vertex_name(v));
        };
        {
            std::vector<int> cells_at_v;
            for (int e : incident) {
                const auto& ed = primal.edges[static_cast<std::size_t>(e)];
                cells_at_v.push_back(ed.k);
                if (ed.l >= 0) cells_at_v.push_back(ed.l);
            }
            std::sort(cells_at_v.begin(), cells_at_v.end());
            cells_at_v.erase(std::unique(cells_at_v.begin(), cells_at_v.end()), cells_at_v.end());
            for (int c : cells_at_v) add_wedge(c);
        }

        // Walk the angular gaps; each is either covered by one wedge or is the
        // single outside gap of a boundary vertex.
        const std::size_t m = order.size();
        std::vector<int> gap_cell(m, -1);
        int uncovered = 0;
        std::size_t outside_gap = m;
        for (std::size_t i = 0; i < m; ++i) {
            const int e_from = order[i].second;
            const int e_to = order[(i + 1) % m].second;
            auto it = wedge_of.find(e_from);
            if (it != wedge_of.end() && it->second.incoming_edge == e_to) {
                gap_cell[i] = it->second.cell;
            } else {
                ++uncovered;
                outside_gap = i;
            }
        }
        if ((on_bdry && uncovered != 1) || (!on_bdry && uncovered != 0)) {
            fail(ErrorKind::DanglingEdge, vertex_name(v) + " has a broken cell fan");
        }

        auto& umb = dual.umbrellas[static_cast<std::size_t>(v)];
        if (on_bdry) {
            const auto& first = primal.edges[static_cast<std::size_t>(order[(outside_gap + 1) % m].second)];
            const auto& last = primal.edges[static_cast<std::size_t>(order[outside_gap].second)];
            if (!first.boundary() || !last.boundary()) {
                fail(ErrorKind::DanglingEdge, vertex_name(v) + " outside gap not bounded by boundary edges");
            }
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t at = (outside_gap + 1 + i) % m;
                umb.edges.push_back(order[at].second);
                if (i + 1 < m) umb.cells.push_back(gap_cell[at]);
            }
        } else {
            // Start at the smallest incident edge id for determinism.
            std::size_t start = 0;
            for (std::size_t i = 1; i < m; ++i) {
                if (order[i].second < order[start].second) start = i;
            }
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t at = (start + i) % m;
                umb.edges.push_back(order[at].second);
                umb.cells.push_back(gap_cell[at]);
            }
        }

        // Dual polygon: cell centers, plus the vertex itself and the two
        // boundary edge midpoints for a boundary vertex.
        std::vector<Vec2> poly;
        if (on_bdry) {
            auto midpoint = [&](int e) {
                const auto& ed = primal.edges[static_cast<std::size_t>(e)];
                return (primal.vertices[static_cast<std::size_t>(ed.v0)] +
                        primal.vertices[static_cast<std::size_t>(ed.v1)]) * 0.5;
            };
            poly.push_back(p);
            poly.push_back(midpoint(umb.edges.front()));
            for (int c : umb.cells) poly.push_back(primal.centers[static_cast<std::size_t>(c)]);
            poly.push_back(midpoint(umb.edges.back()));
        } else {
            for (int c : umb.cells) poly.push_back(primal.centers[static_cast<std::size_t>(c)]);
        }
        dual.areas[static_cast<std::size_t>(v)] = std::abs(polygon_signed_area(poly));
        dual.area_sum += dual.areas[static_cast<std::size_t>(v)];
    }

    for (int v = 0; v < nv; ++v) {
        if (!dual.on_boundary[static_cast<std::size_t>(v)]) dual.interior_ids.push_back(v);
    }
    return dual;
}

namespace {

HalfTri make_half(int cell, Vec2 x_vertex, Vec2 x_cell, Vec2 x_sigma, int edge_id) {
    const double signed_area = triangle_signed_area(x_vertex, x_cell, x_sigma);
    if (signed_area == 0.0) {
        fail(ErrorKind::DegenerateSubTriangle, edge_name(edge_id) + " produces a flat sub-triangle");
    }
    const double s = signed_area > 0.0 ? 1.0 : -1.0;
    HalfTri half;
    half.cell = cell;
    half.area = std::abs(signed_area);
    half.n_vertex_cell = perp(x_cell - x_vertex) * s;
    half.n_cell_sigma = perp(x_sigma - x_cell) * s;
    half.n_sigma_vertex = perp(x_vertex - x_sigma) * s;
    return half;
}

}  // namespace

TriMesh build_third(const PrimalMesh& primal, const DualMesh& dual) {
    TriMesh tri;
    const int nv = primal.n_vertices();
    const int ne = primal.n_edges();
    tri.by_dual.assign(static_cast<std::size_t>(nv), {});
    tri.dual_edge_count.assign(static_cast<std::size_t>(nv), 0);

    // Edge points first, shared bitwise by both endpoint sub-triangles.
    std::vector<Vec2> x_sigma(static_cast<std::size_t>(ne));
    std::vector<double> sigma_coord(static_cast<std::size_t>(ne), 0.0);
    for (int e = 0; e < ne; ++e) {
        const auto& ed = primal.edges[static_cast<std::size_t>(e)];
        const Vec2 a = primal.vertices[static_cast<std::size_t>(ed.v0)];
        const Vec2 b = primal.vertices[static_cast<std::size_t>(ed.v1)];
        if (ed.boundary()) {
            x_sigma[static_cast<std::size_t>(e)] = (a + b) * 0.5;
            sigma_coord[static_cast<std::size_t>(e)] = 0.5;
            continue;
        }
        const Vec2 ck = primal.centers[static_cast<std::size_t>(ed.k)];
        const Vec2 cl = primal.centers[static_cast<std::size_t>(ed.l)];
        const SegmentHit hit = segment_intersection(ck, cl, a, b);
        if (!hit.hit || hit.t <= 0.0 || hit.t >= 1.0) {
            fail(ErrorKind::NoIntersection,
                 edge_name(e) + ": segment between cell centers misses the edge");
        }
        if (hit.s < 1e-10 || hit.s > 1.0 - 1e-10) {
            fail(ErrorKind::DegenerateSubTriangle,
                 edge_name(e) + ": crossing point collapses onto an endpoint");
        }
        x_sigma[static_cast<std::size_t>(e)] = hit.point;
        sigma_coord[static_cast<std::size_t>(e)] = hit.s;
    }

    // Sub-triangles grouped by dual cell, in umbrella order.
    for (int v = 0; v < nv; ++v) {
        const Vec2 xv = primal.vertices[static_cast<std::size_t>(v)];
        for (int e : dual.umbrellas[static_cast<std::size_t>(v)].edges) {
            const auto& ed = primal.edges[static_cast<std::size_t>(e)];
            SubTri st;
            st.edge = e;
            st.vertex = v;
            st.k = ed.k;
            st.l = ed.l;
            st.x_k = primal.centers[static_cast<std::size_t>(ed.k)];
            st.x_vertex = xv;
            st.x_sigma = x_sigma[static_cast<std::size_t>(e)];
            st.sigma_coord = sigma_coord[static_cast<std::size_t>(e)];
            st.half_k = make_half(ed.k, xv, st.x_k, st.x_sigma, e);
            if (ed.l >= 0) {
                st.x_l = primal.centers[static_cast<std::size_t>(ed.l)];
                st.half_l = make_half(ed.l, xv, st.x_l, st.x_sigma, e);
            }
            tri.by_dual[static_cast<std::size_t>(v)].push_back(static_cast<int>(tri.tris.size()));
            tri.tris.push_back(st);
        }
        tri.dual_edge_count[static_cast<std::size_t>(v)] =
            2 * static_cast<int>(tri.by_dual[static_cast<std::size_t>(v)].size());
    }

    // Mesh size: largest circumscribed-circle diameter over the elements
    // (full edge triangles; the k-half for boundary edges).
    tri.h = 0.0;
    for (const auto& st : tri.tris) {
        const double d = st.interior()
                             ? triangle_circumdiameter(st.x_k, st.x_l, st.x_vertex)
                             : triangle_circumdiameter(st.x_vertex, st.x_k, st.x_sigma);
        tri.h = std::max(tri.h, d);
    }
    const double area_floor = 1e-12 * tri.h * tri.h;
    for (const auto& st : tri.tris) {
        if (st.half_k.area <= area_floor || (st.half_l && st.half_l->area <= area_floor)) {
            fail(ErrorKind::DegenerateSubTriangle, edge_name(st.edge) + " at " + vertex_name(st.vertex));
        }
    }

    // Conforming P1 triangulation: two triangles per interior edge, one per
    // boundary edge; node ids are cells first, then vertices.
    const int nc = primal.n_cells();
    for (int e = 0; e < ne; ++e) {
        const auto& ed = primal.edges[static_cast<std::size_t>(e)];
        if (ed.boundary()) {
            tri.p1_elements.push_back({ed.k, nc + ed.v0, nc + ed.v1});
        } else {
            tri.p1_elements.push_back({ed.k, ed.l, nc + ed.v0});
            tri.p1_elements.push_back({ed.k, ed.l, nc + ed.v1});
        }
    }
    return tri;
}

MeshSet build_meshes(PrimalMesh primal) {
    MeshSet meshes;
    meshes.primal = std::move(primal);
    meshes.dual = build_dual(meshes.primal);
    meshes.tri = build_third(meshes.primal, meshes.dual);
    return meshes;
}

RegularityReport regularity_report(const MeshSet& meshes) {
    const auto& primal = meshes.primal;
    const auto& dual = meshes.dual;
    const auto& tri = meshes.tri;

    RegularityReport rep;
    rep.h = tri.h;
    rep.n_cells = primal.n_cells();
    rep.n_vertices = primal.n_vertices();
    rep.n_edges = primal.n_edges();
    rep.n_interior_duals = dual.n_interior();

    double min_diam = std::numeric_limits<double>::infinity();
    rep.min_angle = std::numeric_limits<double>::infinity();
    for (const auto& st : tri.tris) {
        const double d = st.interior()
                             ? triangle_circumdiameter(st.x_k, st.x_l, st.x_vertex)
                             : triangle_circumdiameter(st.x_vertex, st.x_k, st.x_sigma);
        const double area = st.interior() ? st.half_k.area + st.half_l->area : st.half_k.area;
        rep.c3 = std::max(rep.c3, d * d / area);
        min_diam = std::min(min_diam, d);
        rep.min_angle = std::min(rep.min_angle, triangle_min_angle(st.x_vertex, st.x_k, st.x_sigma));
        if (st.interior()) {
            rep.min_angle = std::min(rep.min_angle, triangle_min_angle(st.x_vertex, st.x_l, st.x_sigma));
        }
    }
    rep.zeta = rep.h / min_diam;

    for (int v = 0; v < primal.n_vertices(); ++v) {
        std::vector<Vec2> pts;
        for (int t : tri.by_dual[static_cast<std::size_t>(v)]) {
            const auto& st = tri.tris[static_cast<std::size_t>(t)];
            pts.push_back(st.x_k);
            if (st.interior()) pts.push_back(st.x_l);
            pts.push_back(st.x_sigma);
        }
        if (dual.on_boundary[static_cast<std::size_t>(v)]) {
            pts.push_back(primal.vertices[static_cast<std::size_t>(v)]);
        }
        const double d = polygon_diameter(pts);
        rep.c2 = std::max(rep.c2, d * d / dual.areas[static_cast<std::size_t>(v)]);
    }

    rep.c1 = 0.0;
    for (int c : tri.dual_edge_count) rep.c1 = std::max(rep.c1, static_cast<double>(c));
    return rep;
}

PrimalMesh refine_uniform(const PrimalMesh& primal) {
    std::vector<Vec2> pts = primal.vertices;
    const int nv = primal.n_vertices();

    // Edge midpoints, then face points for cells with four or more corners.
    pts.reserve(pts.size() + static_cast<std::size_t>(primal.n_edges() + primal.n_cells()));
    for (const auto& e : primal.edges) {
        pts.push_back((primal.vertices[static_cast<std::size_t>(e.v0)] +
                       primal.vertices[static_cast<std::size_t>(e.v1)]) * 0.5);
    }
    std::vector<int> face_point(static_cast<std::size_t>(primal.n_cells()), -1);
    for (int k = 0; k < primal.n_cells(); ++k) {
        if (primal.cells[static_cast<std::size_t>(k)].size() >= 4) {
            face_point[static_cast<std::size_t>(k)] = static_cast<int>(pts.size());
            pts.push_back(primal.centers[static_cast<std::size_t>(k)]);
        }
    }

    std::vector<std::vector<int>> cells;
    for (int k = 0; k < primal.n_cells(); ++k) {
        const auto& ids = primal.cells[static_cast<std::size_t>(k)];
        const auto& eids = primal.cell_edges[static_cast<std::size_t>(k)];
        const std::size_t m = ids.size();
        auto mid = [&](std::size_t i) { return nv + eids[i]; };
        if (m == 3) {
            cells.push_back({ids[0], mid(0), mid(2)});
            cells.push_back({ids[1], mid(1), mid(0)});
            cells.push_back({ids[2], mid(2), mid(1)});
            cells.push_back({mid(0), mid(1), mid(2)});
        } else {
            const int c = face_point[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < m; ++i) {
                cells.push_back({ids[i], mid(i), c, mid((i + m - 1) % m)});
            }
        }
    }
    return build_primal(std::move(pts), std::move(cells));
}

PrimalMesh make_quad_mesh(int n) {
    if (n < 1) fail(ErrorKind::UsageError, "quad mesh needs n >= 1");
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            pts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        }
    }
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return build_primal(std::move(pts), std::move(cells));
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

/// Next content line (skips blanks and '#' comments); false at EOF.
bool next_content_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        return true;
    }
    return false;
}

}  // namespace

PrimalMesh load_mesh(std::istream& in) {
    std::string line;
    int line_no = 0;

    if (!next_content_line(in, line, line_no)) parse_fail(line_no, "missing header");
    long nv = 0;
    long nc = 0;
    {
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> nv >> nc) || (ss >> extra)) parse_fail(line_no, "header must be 'nv nc'");
        if (nv < 3 || nc < 1) parse_fail(line_no, "header counts out of range");
    }

    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, line_no)) parse_fail(line_no, "expected vertex line");
        std::istringstream ss(line);
        std::string sx, sy, extra;
        if (!(ss >> sx >> sy) || (ss >> extra)) parse_fail(line_no, "vertex line must be 'x y'");
        // strtod so that textual "nan"/"inf" reach the finiteness check
        // instead of failing as a generic format error.
        char* end = nullptr;
        const double x = std::strtod(sx.c_str(), &end);
        if (end != sx.c_str() + sx.size()) parse_fail(line_no, "vertex line must be 'x y'");
        const double y = std::strtod(sy.c_str(), &end);
        if (end != sy.c_str() + sy.size()) parse_fail(line_no, "vertex line must be 'x y'");
        if (!std::isfinite(x) || !std::isfinite(y)) parse_fail(line_no, "non-finite coordinate");
        pts.emplace_back(x, y);
    }

    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(nc));
    for (long c = 0; c < nc; ++c) {
        if (!next_content_line(in, line, line_no)) parse_fail(line_no, "expected cell line");
        std::istringstream ss(line);
        long count = 0;
        if (!(ss >> count)) parse_fail(line_no, "cell line must start with a vertex count");
        if (count < 3) parse_fail(line_no, "cell needs at least 3 vertices");
        std::vector<int> ids;
        ids.reserve(static_cast<std::size_t>(count));
        for (long i = 0; i < count; ++i) {
            long id = 0;
            if (!(ss >> id)) parse_fail(line_no, "cell line ended early");
            if (id < 0 || id >= nv) parse_fail(line_no, "vertex id " + std::to_string(id) + " out of range");
            ids.push_back(static_cast<int>(id));
        }
        std::string extra;
        if (ss >> extra) parse_fail(line_no, "trailing tokens on cell line");
        cells.push_back(std::move(ids));
    }

    if (next_content_line(in, line, line_no)) parse_fail(line_no, "unexpected content after last cell");
    return build_primal(std::move(pts), std::move(cells));
}

PrimalMesh load_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "' for reading");
    return load_mesh(in);
}

void save_mesh(const PrimalMesh& mesh, std::ostream& out) {
    char buf[80];
    out << mesh.n_vertices() << ' ' << mesh.n_cells() << '\n';
    for (const Vec2& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    for (const auto& ids : mesh.cells) {
        out << ids.size();
        for (int id : ids) out << ' ' << id;
        out << '\n';
    }
}

void save_mesh_file(const PrimalMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    save_mesh(mesh, out);
    out.flush();
    if (!out) fail(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace pfecc
