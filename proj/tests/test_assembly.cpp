#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "pfecc/assembly.hpp"
#include "pfecc/errors.hpp"
#include "pfecc/linsolve.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"
#include "pfecc/verify.hpp"
#include "pfecc/viscosity.hpp"
#include "support.hpp"

using namespace pfecc;

namespace {

GlobalSystem assemble_on(const MeshSet& ms, const std::string& mu_id, double lambda,
                         bool boundary_pressure = false) {
    const DiscreteOps ops = build_ops(ms, cell_viscosities(parse_viscosity(mu_id), ms.primal));
    const Loads loads = assemble_rhs(ms, ops, [](Vec2 x) {
        return Vec2{std::sin(3.0 * x.x) + 0.2, std::cos(2.0 * x.y)};
    });
    return assemble_global(ms, ops, loads, lambda, boundary_pressure);
}

double max_asymmetry(const Eigen::SparseMatrix<double>& A) {
    Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
    double worst = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    double scale = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    return worst / scale;
}

}  // namespace

TEST_CASE("system shape: two velocity rows per cell, one pressure row per active dual") {
    const MeshSet ms = build_meshes(make_quad_mesh(4));
    const GlobalSystem sys = assemble_on(ms, "const:1", 1.0);

    CHECK(sys.n_cells == 16);
    CHECK(sys.pressure_ids.size() == 9);
    CHECK(sys.n_rows() == 41);
    CHECK(sys.A.rows() == 41);
    CHECK(sys.A.cols() == 41);
    CHECK(sys.F.size() == 41);
    CHECK(sys.records.size() == 9);

    for (std::size_t s = 0; s < sys.pressure_ids.size(); ++s) {
        const int v = sys.pressure_ids[s];
        CHECK_FALSE(ms.dual.on_boundary[v]);
        CHECK(sys.pressure_slot[v] == static_cast<int>(s));
        CHECK(sys.pressure_row(static_cast<int>(s)) == 32 + static_cast<int>(s));
    }

    // With boundary pressures every dual cell gets a row.
    const GlobalSystem all = assemble_on(ms, "const:1", 1.0, true);
    CHECK(all.pressure_ids.size() == 25);
    CHECK(all.n_rows() == 57);
}

TEST_CASE("local eliminations are well conditioned and locally supported") {
    const MeshSet ms = build_meshes(pfecc::testing::make_distorted_mesh(3, 0.2));
    const DiscreteOps ops = build_ops(ms, cell_viscosities(parse_viscosity("smooth"), ms.primal));
    const Loads loads = assemble_rhs(ms, ops, [](Vec2 x) { return Vec2{x.y, -x.x}; });
    const GlobalSystem sys = assemble_global(ms, ops, loads, 1.0, false);

    for (const EliminationRecord& rec : sys.records) {
        CHECK(rec.alpha > 0.0);
        CHECK(rec.cond == doctest::Approx(1.0));

        // Recompute the vertex momentum diagonal and divergence moments
        // directly from the per-half gradient maps.
        double alpha = 0.0;
        Vec2 d{};
        for (int t : ms.tri.by_dual[rec.vertex]) {
            const SubTriOps& op = ops.tri_ops[t];
            alpha += op.half_k.mu * op.half_k.area * norm2(op.half_k.g_vertex);
            d += op.half_k.g_vertex * op.half_k.area;
            if (op.half_l.has_value()) {
                alpha += op.half_l->mu * op.half_l->area * norm2(op.half_l->g_vertex);
                d += op.half_l->g_vertex * op.half_l->area;
            }
        }
        CHECK(rec.alpha == doctest::Approx(alpha).epsilon(1e-13));
        CHECK(rec.d.x == doctest::Approx(d.x).epsilon(1e-12));
        CHECK(rec.d.y == doctest::Approx(d.y).epsilon(1e-12));

        // Support stays inside the umbrella of cells around the vertex.
        const auto& cells = ms.dual.umbrellas[rec.vertex].cells;
        for (std::size_t i = 0; i < rec.cell_coeffs.size(); ++i) {
            if (i > 0) CHECK(rec.cell_coeffs[i - 1].first < rec.cell_coeffs[i].first);
            CHECK(std::count(cells.begin(), cells.end(), rec.cell_coeffs[i].first) == 1);
        }
    }
}

TEST_CASE("assembled matrix is symmetric") {
    for (bool bp : {false, true}) {
        const MeshSet ms = build_meshes(pfecc::testing::make_distorted_mesh(4, 0.2));
        const GlobalSystem sys = assemble_on(ms, "smooth", 0.7, bp);
        CHECK(max_asymmetry(sys.A) < 1e-12);
    }
}

TEST_CASE("pressure diagonal carries exactly the penalty scaling on structured meshes") {
    // Constant viscosity on a structured mesh: the vertex divergence moments
    // vanish identically, leaving the pure penalty entry.
    const MeshSet ms = build_meshes(make_quad_mesh(4));
    for (double lambda : {1.0, 1.3}) {
        const GlobalSystem sys = assemble_on(ms, "const:1", lambda);

        for (const EliminationRecord& rec : sys.records) {
            CHECK(rec.d.x == 0.0);
            CHECK(rec.d.y == 0.0);
        }
        for (std::size_t s = 0; s < sys.pressure_ids.size(); ++s) {
            const int row = sys.pressure_row(static_cast<int>(s));
            const double area = ms.dual.areas[sys.pressure_ids[s]];
            CHECK(sys.A.coeff(row, row) == -(lambda * sys.h * area));
        }
    }
}

TEST_CASE("velocity block is symmetric positive definite") {
    const MeshSet ms = build_meshes(make_quad_mesh(8));
    const GlobalSystem sys = assemble_on(ms, "jump:1:10", 1.0);
    const SpdReport rep = check_spd(velocity_block(sys));
    CHECK(rep.is_spd);
    CHECK(rep.min_eigenvalue > 0.0);
}

TEST_CASE("load moments sum to the forcing integral minus the pinned boundary slice") {
    const MeshSet ms = build_meshes(pfecc::testing::make_distorted_mesh(3, 0.15));
    const DiscreteOps ops = build_ops(ms, cell_viscosities(parse_viscosity("const:1"), ms.primal));
    const Loads loads = assemble_rhs(ms, ops, [](Vec2) { return Vec2{1.0, 0.0}; });

    Vec2 total{};
    for (const Vec2& m : loads.cell_moment) total += m;
    for (const Vec2& m : loads.vertex_moment) total += m;

    // The nodal basis functions sum to 1 except on boundary halves, where the
    // pinned edge value removes one hat worth area/3.
    double pinned = 0.0;
    for (const SubTri& st : ms.tri.tris)
        if (!st.interior()) pinned += st.half_k.area / 3.0;

    CHECK(total.x == doctest::Approx(ms.primal.domain_area - pinned).epsilon(1e-13));
    CHECK(std::abs(total.y) < 1e-15);
}

TEST_CASE("eliminated solve matches the dense reference") {
    const MeshSet ms = build_meshes(make_quad_mesh(3));
    const ManufacturedCase mc = make_case("MS-1");
    const DiscreteOps ops = build_ops(ms, cell_viscosities(mc.mu, ms.primal));
    const Loads loads = assemble_rhs(ms, ops, mc.f);
    const GlobalSystem sys = assemble_global(ms, ops, loads, 1.0, false);
    const SolveReport rep = solve_direct(sys);
    const DiscreteVelocity u = recover_vertex_velocities(ms, sys, rep.x);
    const DiscretePressure p = extract_pressure(ms, sys, rep.x);

    const pfecc::testing::DenseSolution ref =
        pfecc::testing::solve_dense_reference(ms, ops, mc.f, 1.0, false);

    double unorm = 0.0, du = 0.0, pnorm = 0.0, dp = 0.0;
    for (int k = 0; k < ms.primal.n_cells(); ++k) {
        unorm = std::max(unorm, norm(ref.u_cell[k]));
        du = std::max(du, norm(u.cell[k] - ref.u_cell[k]));
    }
    for (int v = 0; v < ms.primal.n_vertices(); ++v) {
        unorm = std::max(unorm, norm(ref.u_vertex[v]));
        du = std::max(du, norm(u.vertex[v] - ref.u_vertex[v]));
        pnorm = std::max(pnorm, std::abs(ref.p_dual[v]));
        dp = std::max(dp, std::abs(p.dual[v] - ref.p_dual[v]));
    }
    CHECK(du < 1e-10 * unorm);
    CHECK(dp < 1e-10 * pnorm);
}

TEST_CASE("boundary conditions and inactive slots stay pinned") {
    const MeshSet ms = build_meshes(make_quad_mesh(4));
    const ManufacturedCase mc = make_case("MS-1");
    const CaseSolution sol = solve_case(ms, mc, 1.0, false);

    for (int v = 0; v < ms.primal.n_vertices(); ++v) {
        if (ms.primal.vertex_on_boundary[v]) {
            CHECK(sol.u.vertex[v].x == 0.0);
            CHECK(sol.u.vertex[v].y == 0.0);
            CHECK(sol.p.dual[v] == 0.0);  // inactive without boundary pressures
        }
    }
}

TEST_CASE("assembly rejects a non-positive penalty parameter") {
    const MeshSet ms = build_meshes(make_quad_mesh(2));
    const DiscreteOps ops = build_ops(ms, cell_viscosities(parse_viscosity("const:1"), ms.primal));
    const Loads loads = assemble_rhs(ms, ops, [](Vec2) { return Vec2{}; });
    try {
        assemble_global(ms, ops, loads, 0.0, false);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UsageError);
    }
}

TEST_CASE("matrix export writes sorted coordinate triplets") {
    const MeshSet ms = build_meshes(make_quad_mesh(2));
    const GlobalSystem sys = assemble_on(ms, "const:1", 1.0);
    const pfecc::testing::TempDir dir;
    const std::string path = dir.file("matrix.txt");
    write_matrix(sys.A, path);

    std::istringstream in(pfecc::testing::read_file(path));
    int prev_row = -1, prev_col = -1, rows = 0;
    int r = 0, c = 0;
    double v = 0.0;
    while (in >> r >> c >> v) {
        CHECK(r >= 0);
        CHECK(c >= 0);
        CHECK(r < sys.n_rows());
        CHECK(c < sys.n_rows());
        const bool ordered = r > prev_row || (r == prev_row && c > prev_col);
        CHECK(ordered);
        prev_row = r;
        prev_col = c;
        ++rows;
    }
    CHECK(rows == sys.A.nonZeros());
}
