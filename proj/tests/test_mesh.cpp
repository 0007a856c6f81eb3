#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "pfecc/errors.hpp"
#include "pfecc/mesh.hpp"
#include "support.hpp"

using namespace pfecc;
using pfecc::testing::make_two_square_mesh;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::UsageError;
}

}  // namespace

TEST_CASE("structured 4x4 mesh census") {
    const MeshSet ms = build_meshes(make_quad_mesh(4));
    const PrimalMesh& pm = ms.primal;

    CHECK(pm.n_cells() == 16);
    CHECK(pm.n_vertices() == 25);
    CHECK(pm.n_edges() == 40);
    CHECK(pm.n_interior_edges == 24);
    CHECK(pm.n_boundary_edges == 16);
    CHECK(pm.domain_area == doctest::Approx(1.0).epsilon(1e-14));

    int boundary_vertices = 0;
    for (bool b : pm.vertex_on_boundary) boundary_vertices += b ? 1 : 0;
    CHECK(boundary_vertices == 16);

    for (int k = 0; k < pm.n_cells(); ++k) {
        CHECK(pm.cell_areas[k] == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
        // Centers sit at the cell centroids.
        const Vec2 c = pm.centers[k];
        CHECK(std::abs(std::remainder(c.x - 0.125, 0.25)) < 1e-14);
        CHECK(std::abs(std::remainder(c.y - 0.125, 0.25)) < 1e-14);
    }

    CHECK(ms.dual.n_duals() == 25);
    CHECK(ms.dual.n_interior() == 9);
    CHECK(ms.dual.area_sum == doctest::Approx(pm.domain_area).epsilon(1e-13));
    for (int v : ms.dual.interior_ids) {
        CHECK_FALSE(ms.dual.on_boundary[v]);
        CHECK(ms.dual.areas[v] == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
    }

    CHECK(ms.tri.h == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("structured 4x4 regularity constants") {
    const MeshSet ms = build_meshes(make_quad_mesh(4));
    const RegularityReport rep = regularity_report(ms);
    CHECK(rep.h == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rep.c1 == doctest::Approx(8.0));
    CHECK(rep.c2 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rep.c3 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.zeta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.min_angle == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    CHECK(rep.n_cells == 16);
    CHECK(rep.n_vertices == 25);
    CHECK(rep.n_edges == 40);
    CHECK(rep.n_interior_duals == 9);
}

TEST_CASE("edge point sits where the center segment crosses the edge") {
    const MeshSet ms = build_meshes(make_quad_mesh(2));

    bool found = false;
    for (const SubTri& st : ms.tri.tris) {
        if (!st.interior()) {
            // Boundary edges carry the midpoint.
            const auto& ed = ms.primal.edges[st.edge];
            const Vec2 mid = (ms.primal.vertices[ed.v0] + ms.primal.vertices[ed.v1]) / 2.0;
            CHECK(norm(st.x_sigma - mid) < 1e-14);
            continue;
        }
        // x_sigma lies on the segment [x_k, x_l] ...
        CHECK(std::abs(cross(st.x_sigma - st.x_k, st.x_l - st.x_k)) < 1e-13);
        // ... and strictly inside the edge.
        CHECK(st.sigma_coord > 0.0);
        CHECK(st.sigma_coord < 1.0);

        const auto& ed = ms.primal.edges[st.edge];
        const Vec2 a = ms.primal.vertices[ed.v0];
        const Vec2 b = ms.primal.vertices[ed.v1];
        CHECK(norm(st.x_sigma - (a + (b - a) * st.sigma_coord)) < 1e-13);

        // The vertical edge between the two bottom cells: hand-computed crossing.
        if (std::abs(a.x - 0.5) < 1e-14 && std::abs(b.x - 0.5) < 1e-14 &&
            std::max(a.y, b.y) < 0.75) {
            CHECK(st.x_sigma.x == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(st.x_sigma.y == doctest::Approx(0.25).epsilon(1e-14));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("sub-triangle halves carry outward edge-length normals") {
    for (const PrimalMesh& pm :
         {make_quad_mesh(3), pfecc::testing::make_distorted_mesh(3, 0.2), make_two_square_mesh()}) {
        const MeshSet ms = build_meshes(PrimalMesh(pm));
        double tiled = 0.0;
        for (const SubTri& st : ms.tri.tris) {
            auto check_half = [&](const HalfTri& h, Vec2 x_cell) {
                const double scale = norm(st.x_vertex - x_cell) + norm(st.x_sigma - x_cell);
                const Vec2 closure = h.n_vertex_cell + h.n_cell_sigma + h.n_sigma_vertex;
                CHECK(norm(closure) < 1e-13 * scale);  // normals of a closed boundary

                CHECK(norm(h.n_vertex_cell) ==
                      doctest::Approx(norm(x_cell - st.x_vertex)).epsilon(1e-13));
                CHECK(norm(h.n_cell_sigma) ==
                      doctest::Approx(norm(st.x_sigma - x_cell)).epsilon(1e-13));
                CHECK(norm(h.n_sigma_vertex) ==
                      doctest::Approx(norm(st.x_vertex - st.x_sigma)).epsilon(1e-13));

                // Outward: each normal points away from the opposite point.
                CHECK(dot(h.n_sigma_vertex, (st.x_sigma + st.x_vertex) / 2.0 - x_cell) > 0.0);
                CHECK(dot(h.n_cell_sigma, (x_cell + st.x_sigma) / 2.0 - st.x_vertex) > 0.0);
                CHECK(dot(h.n_vertex_cell, (st.x_vertex + x_cell) / 2.0 - st.x_sigma) > 0.0);

                CHECK(h.area ==
                      doctest::Approx(std::abs(
                          triangle_signed_area(st.x_vertex, x_cell, st.x_sigma)))
                          .epsilon(1e-13));
                tiled += h.area;
            };
            CHECK(st.half_k.cell == st.k);
            check_half(st.half_k, st.x_k);
            if (st.interior()) {
                REQUIRE(st.half_l.has_value());
                CHECK(st.half_l->cell == st.l);
                check_half(*st.half_l, st.x_l);
            } else {
                CHECK_FALSE(st.half_l.has_value());
            }
        }
        // The halves tile the whole domain.
        CHECK(tiled == doctest::Approx(ms.primal.domain_area).epsilon(1e-12));
    }
}

TEST_CASE("sub-triangles group by owning dual cell") {
    const MeshSet ms = build_meshes(make_quad_mesh(3));
    std::size_t counted = 0;
    for (int v = 0; v < ms.dual.n_duals(); ++v) {
        for (int t : ms.tri.by_dual[v]) {
            CHECK(ms.tri.tris[t].vertex == v);
            ++counted;
        }
    }
    CHECK(counted == ms.tri.tris.size());

    // Every edge contributes one sub-triangle per endpoint.
    CHECK(ms.tri.tris.size() == 2 * static_cast<std::size_t>(ms.primal.n_edges()));
}

TEST_CASE("p1 triangulation covers the domain") {
    const MeshSet ms = build_meshes(pfecc::testing::make_distorted_mesh(3, 0.2));
    const int nc = ms.primal.n_cells();
    CHECK(ms.tri.p1_elements.size() ==
          static_cast<std::size_t>(2 * ms.primal.n_interior_edges + ms.primal.n_boundary_edges));
    double area = 0.0;
    for (const auto& el : ms.tri.p1_elements) {
        std::array<Vec2, 3> xs{};
        for (int i = 0; i < 3; ++i) {
            const int node = el[i];
            REQUIRE(node >= 0);
            REQUIRE(node < nc + ms.primal.n_vertices());
            xs[i] = node < nc ? ms.primal.centers[node] : ms.primal.vertices[node - nc];
        }
        area += std::abs(triangle_signed_area(xs[0], xs[1], xs[2]));
    }
    CHECK(area == doctest::Approx(ms.primal.domain_area).epsilon(1e-12));
}

TEST_CASE("uniform refinement quarters quads and preserves area") {
    const PrimalMesh coarse = make_quad_mesh(2);
    const PrimalMesh fine = refine_uniform(coarse);
    CHECK(fine.n_cells() == 16);
    CHECK(fine.n_vertices() == 25);
    CHECK(fine.n_edges() == 40);
    CHECK(fine.domain_area == doctest::Approx(1.0).epsilon(1e-14));

    const MeshSet mc = build_meshes(PrimalMesh(coarse));
    const MeshSet mf = build_meshes(PrimalMesh(fine));
    CHECK(mf.tri.h == doctest::Approx(mc.tri.h / 2.0).epsilon(1e-13));
}

TEST_CASE("uniform refinement handles triangles and polygons") {
    // Two triangles from a split square: each splits into four similar
    // triangles through the edge midpoints, so angles are preserved.
    PrimalMesh tris = build_primal({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                                   {{0, 1, 2}, {0, 2, 3}});
    const double coarse_angle =
        triangle_min_angle(tris.vertices[0], tris.vertices[1], tris.vertices[2]);
    const PrimalMesh fine = refine_uniform(tris);
    CHECK(fine.n_cells() == 8);
    CHECK(fine.domain_area == doctest::Approx(1.0).epsilon(1e-13));
    for (const std::vector<int>& cell : fine.cells) {
        REQUIRE(cell.size() == 3);
        const double a = triangle_min_angle(fine.vertices[cell[0]], fine.vertices[cell[1]],
                                            fine.vertices[cell[2]]);
        CHECK(a == doctest::Approx(coarse_angle).epsilon(1e-12));
    }

    // A pentagon refines into five corner quads.
    std::vector<Vec2> penta;
    for (int i = 0; i < 5; ++i) {
        const double a = 2.0 * M_PI * i / 5.0;
        penta.push_back({std::cos(a), std::sin(a)});
    }
    const double penta_area = polygon_signed_area(penta);
    PrimalMesh pm = build_primal(std::move(penta), {{0, 1, 2, 3, 4}});
    const PrimalMesh pf = refine_uniform(pm);
    CHECK(pf.n_cells() == 5);
    CHECK(pf.domain_area == doctest::Approx(penta_area).epsilon(1e-13));
    CHECK(build_meshes(PrimalMesh(pf)).dual.n_interior() == 1);  // only the centroid vertex
}

TEST_CASE("single-cell meshes have no interior dual cells") {
    const MeshSet ms = build_meshes(build_primal({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}}));
    CHECK(ms.primal.n_cells() == 1);
    CHECK(ms.dual.n_interior() == 0);
    CHECK(ms.primal.n_interior_edges == 0);
    CHECK(ms.primal.n_boundary_edges == 4);
    for (const SubTri& st : ms.tri.tris) CHECK_FALSE(st.interior());
    CHECK(ms.tri.tris.size() == 8);  // two per boundary edge
}

TEST_CASE("mesh files round-trip exactly") {
    const PrimalMesh mesh = pfecc::testing::make_distorted_mesh(3, 0.15);
    std::ostringstream out;
    save_mesh(mesh, out);

    // Comments and blank lines are skipped on load.
    std::istringstream in("# comment line\n\n" + out.str());
    const PrimalMesh back = load_mesh(in);
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_cells() == mesh.n_cells());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        CHECK(back.vertices[v].x == mesh.vertices[v].x);
        CHECK(back.vertices[v].y == mesh.vertices[v].y);
    }
    for (int k = 0; k < mesh.n_cells(); ++k) CHECK(back.cells[k] == mesh.cells[k]);
}

TEST_CASE("malformed mesh text reports the offending line") {
    auto load = [](const std::string& text) {
        std::istringstream in(text);
        return load_mesh(in);
    };

    auto expect_parse_error = [&](const std::string& text, const std::string& fragment) {
        try {
            load(text);
            FAIL("expected a parse error for: " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            CHECK(std::string(e.what()).find("line ") != std::string::npos);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    expect_parse_error("", "header");
    expect_parse_error("4\n", "header");
    expect_parse_error("abc def\n", "header");
    expect_parse_error("4 1\n0 0\n1\n1 1\n0 1\n4 0 1 2 3\n", "vertex");
    expect_parse_error("4 1\nnan 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n", "non-finite");
    expect_parse_error("4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 9\n", "out of range");
    expect_parse_error("4 1\n0 0\n1 0\n1 1\n0 1\n2 0 1\n", "at least 3");
    expect_parse_error("4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\nleftover\n", "after");
}

TEST_CASE("missing mesh file raises an io error") {
    try {
        load_mesh_file("/nonexistent/mesh.txt");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
    }
}

TEST_CASE("invalid cell geometry is rejected with the specific failure kind") {
    const std::vector<Vec2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

    CHECK(kind_of([&] { build_primal(sq, {{0, 3, 2, 1}}); }) == ErrorKind::NonSimplePolygon);
    // Asymmetric bowtie with positive signed area, so the self-intersection
    // check is the one that fires.
    CHECK(kind_of([&] {
              build_primal({{0, 0}, {3, 0}, {0, 2}, {1, -2}}, {{0, 1, 2, 3}});
          }) == ErrorKind::NonSimplePolygon);
    CHECK(kind_of([&] { build_primal(sq, {{0, 1, 1, 2, 3}}); }) == ErrorKind::NonSimplePolygon);
    CHECK(kind_of([&] {
              build_primal({{0, 0}, {1, 0}, {2, 0}, {1, 1e-18}}, {{0, 1, 3}, {1, 2, 3}});
          }) == ErrorKind::ZeroAreaCell);
    CHECK(kind_of([&] { build_primal(sq, {{0, 1, 2}}); }) == ErrorKind::DanglingEdge);  // unused vertex

    // Thin U-shape: simple and CCW, but the area centroid falls in the notch.
    CHECK(kind_of([&] {
              build_primal({{0, 0}, {5, 0}, {5, 5}, {4, 5}, {4, 1}, {1, 1}, {1, 5}, {0, 5}},
                           {{0, 1, 2, 3, 4, 5, 6, 7}});
          }) == ErrorKind::CellCenterOutside);

    // Three cells sharing one edge.
    CHECK(kind_of([&] {
              build_primal({{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {2, 0.5}},
                           {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
          }) == ErrorKind::DanglingEdge);
}

TEST_CASE("center segments that miss or graze the shared edge are rejected") {
    // The second quad leans so far that the centroid segment passes above the
    // shared edge.
    CHECK(kind_of([&] {
              build_meshes(build_primal({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 2}, {2, 5}},
                                        {{0, 1, 2, 3}, {1, 4, 5, 2}}));
          }) == ErrorKind::NoIntersection);

    // Centers nudged by hand so the crossing lands exactly on an edge endpoint.
    PrimalMesh pm = make_quad_mesh(2);
    int left = -1, right = -1;
    for (int k = 0; k < pm.n_cells(); ++k) {
        if (norm(pm.centers[k] - Vec2{0.25, 0.25}) < 1e-12) left = k;
        if (norm(pm.centers[k] - Vec2{0.75, 0.25}) < 1e-12) right = k;
    }
    REQUIRE(left >= 0);
    REQUIRE(right >= 0);
    pm.centers[left] = {0.25, 0.25};
    pm.centers[right] = {0.75, -0.25};  // crossing at (0.5, 0), an edge endpoint
    CHECK(kind_of([&] { build_third(pm, build_dual(pm)); }) == ErrorKind::DegenerateSubTriangle);
}

TEST_CASE("quad mesh factory validates its size") {
    CHECK(kind_of([] { make_quad_mesh(0); }) == ErrorKind::UsageError);
    CHECK(kind_of([] { make_quad_mesh(-3); }) == ErrorKind::UsageError);
}
