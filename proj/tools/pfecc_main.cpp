/** @file pfecc_main.cpp
 *  @brief Command-line driver: mesh checks, solves, convergence and
 *         consistency studies with reproducible CSV/VTK output.
 */

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "CLI11.hpp"
#include "pfecc/assembly.hpp"
#include "pfecc/errors.hpp"
#include "pfecc/linsolve.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"
#include "pfecc/verify.hpp"
#include "pfecc/viscosity.hpp"
#include "pfecc/vtk.hpp"

namespace fs = std::filesystem;
using namespace pfecc;

namespace {

struct RunConfig {
    std::string mesh = "quad:8";
    std::string case_id = "MS-1";
    std::string mu_id;  // empty = case default
    double lambda_pen = 1.0;
    int levels = 4;
    std::string out_dir = ".";
    std::string field = "sinsin";
    bool vtk = false;
    bool export_matrix = false;
    bool boundary_pressure = false;
};

int parse_int_strict(const std::string& text, const std::string& what) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        fail(ErrorKind::UsageError, "bad " + what + " '" + text + "'");
    }
    return value;
}

double parse_double_strict(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos == text.size()) return value;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::UsageError, "bad " + what + " '" + text + "'");
}

PrimalMesh load_primal(const std::string& spec) {
    if (spec.rfind("quad:", 0) == 0) {
        const int n = parse_int_strict(spec.substr(5), "mesh spec");
        if (n < 1) fail(ErrorKind::UsageError, "mesh spec '" + spec + "' needs n >= 1");
        return make_quad_mesh(n);
    }
    return load_mesh_file(spec);
}

struct CaseSetup {
    ManufacturedCase mc;
    bool has_exact = false;
};

/// Builds the run case. Manufactured cases pin their own viscosity; the
/// solve-only forcing `solve-only:<fx>:<fy>` pairs with --mu (default const:1).
CaseSetup build_case(const RunConfig& cfg) {
    if (cfg.case_id.rfind("solve-only", 0) == 0) {
        const std::string rest = cfg.case_id.substr(10);
        if (rest.empty() || rest[0] != ':') {
            fail(ErrorKind::UsageError, "solve-only case needs the form solve-only:<fx>:<fy>");
        }
        const std::size_t sep = rest.find(':', 1);
        if (sep == std::string::npos) {
            fail(ErrorKind::UsageError, "solve-only case needs the form solve-only:<fx>:<fy>");
        }
        const Vec2 f{parse_double_strict(rest.substr(1, sep - 1), "forcing component"),
                     parse_double_strict(rest.substr(sep + 1), "forcing component")};
        CaseSetup cs;
        cs.mc.name = cfg.case_id;
        cs.mc.mu = parse_viscosity(cfg.mu_id.empty() ? "const:1" : cfg.mu_id);
        cs.mc.f = [f](Vec2) { return f; };
        cs.mc.u = [](Vec2) { return Vec2{}; };
        cs.mc.grad_u = [](Vec2) { return std::array<Vec2, 2>{Vec2{}, Vec2{}}; };
        cs.mc.p = [](Vec2) { return 0.0; };
        cs.has_exact = false;
        return cs;
    }
    if (!cfg.mu_id.empty()) {
        fail(ErrorKind::UsageError,
             "case '" + cfg.case_id + "' fixes its own viscosity; --mu applies to solve-only runs");
    }
    return CaseSetup{make_case(cfg.case_id), true};
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create output directory '" + cfg.out_dir + "'");
    return dir;
}

void write_solution_csv(const MeshSet& meshes, const GlobalSystem& system,
                        const DiscreteVelocity& u, const DiscretePressure& p,
                        const fs::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    char buf[200];
    out << "# cells: id,x,y,ux,uy\n";
    for (int k = 0; k < meshes.primal.n_cells(); ++k) {
        const Vec2 x = meshes.primal.centers[static_cast<std::size_t>(k)];
        const Vec2 val = u.cell[static_cast<std::size_t>(k)];
        std::snprintf(buf, sizeof buf, "%d,%.9e,%.9e,%.9e,%.9e\n", k, x.x, x.y, val.x, val.y);
        out << buf;
    }
    out << "# duals: id,x,y,p\n";
    for (int v : system.pressure_ids) {
        const Vec2 x = meshes.primal.vertices[static_cast<std::size_t>(v)];
        std::snprintf(buf, sizeof buf, "%d,%.9e,%.9e,%.9e\n", v, x.x, x.y,
                      p.dual[static_cast<std::size_t>(v)]);
        out << buf;
    }
    if (!out) fail(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

int cmd_check_mesh(const RunConfig& cfg) {
    const MeshSet meshes = build_meshes(load_primal(cfg.mesh));
    const RegularityReport rep = regularity_report(meshes);
    std::printf("mesh: %s\n", cfg.mesh.c_str());
    std::printf("cells: %d  vertices: %d  edges: %d  interior dual cells: %d\n", rep.n_cells,
                rep.n_vertices, rep.n_edges, rep.n_interior_duals);
    std::printf("h (max element diameter): %.6e\n", rep.h);
    std::printf("C1 (max boundary segments per dual cell): %g\n", rep.c1);
    std::printf("C2 (max dual diameter^2 / dual area): %.6e\n", rep.c2);
    std::printf("C3 (max element diameter^2 / element area): %.6e\n", rep.c3);
    std::printf("zeta (h / min element diameter): %.6e\n", rep.zeta);
    std::printf("min element angle: %.6e rad\n", rep.min_angle);
    std::printf("mesh ok\n");
    return 0;
}

int cmd_solve(const RunConfig& cfg) {
    const MeshSet meshes = build_meshes(load_primal(cfg.mesh));
    const CaseSetup cs = build_case(cfg);
    const CaseSolution sol = solve_case(meshes, cs.mc, cfg.lambda_pen, cfg.boundary_pressure);
    std::printf("case: %s  cells: %d  system rows: %d\n", cs.mc.name.c_str(),
                meshes.primal.n_cells(), sol.system.n_rows());
    std::printf("relative residual: %.3e (%s, %.3f s)\n", sol.report.rel_residual,
                sol.report.method.c_str(), sol.report.wall_seconds);
    const SpdReport spd = check_spd(velocity_block(sol.system));
    if (spd.is_spd) {
        std::printf("velocity block SPD: yes (min eigenvalue %.3e)\n", spd.min_eigenvalue);
    } else {
        std::printf("velocity block SPD: no\n");
    }
    const fs::path dir = ensure_out_dir(cfg);
    write_solution_csv(meshes, sol.system, sol.u, sol.p, dir / "solution.csv");
    std::printf("wrote %s\n", (dir / "solution.csv").string().c_str());
    if (cfg.vtk) {
        write_vtk(meshes, sol.u, sol.p, (dir / "solution.vtk").string());
        std::printf("wrote %s\n", (dir / "solution.vtk").string().c_str());
    }
    if (cfg.export_matrix) {
        write_matrix(sol.system.A, (dir / "matrix.txt").string());
        std::printf("wrote %s\n", (dir / "matrix.txt").string().c_str());
    }
    return 0;
}

int cmd_convergence(const RunConfig& cfg) {
    if (cfg.levels < 3) fail(ErrorKind::UsageError, "convergence study needs at least 3 levels");
    const CaseSetup cs = build_case(cfg);
    if (!cs.has_exact) {
        fail(ErrorKind::UsageError, "convergence study needs a case with an exact solution");
    }
    const PrimalMesh base = load_primal(cfg.mesh);
    const ConvergenceTable table =
        run_convergence(cs.mc, base, cfg.levels, cfg.lambda_pen, cfg.boundary_pressure);
    const fs::path dir = ensure_out_dir(cfg);
    const fs::path csv = dir / "convergence.csv";
    {
        std::ofstream out(csv);
        if (!out) fail(ErrorKind::IoError, "cannot open '" + csv.string() + "' for writing");
        write_convergence_csv(table, out);
        if (!out) fail(ErrorKind::IoError, "write to '" + csv.string() + "' failed");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const ConvergenceRow& row = table.rows[r];
        std::printf("level %zu: h=%.4e dof=%d err_u_l2=%.4e err_p_l2=%.4e err_u_h1=%.4e\n", r,
                    row.h, row.dof, row.err_u_l2, row.err_p_l2, row.err_u_h1);
    }
    std::printf("wrote %s\n", csv.string().c_str());

    double max_err = 0.0;
    bool decreasing = true;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        max_err = std::max({max_err, table.rows[r].err_u_l2, table.rows[r].err_p_l2});
        if (r > 0) {
            decreasing = decreasing && table.rows[r].err_u_l2 < table.rows[r - 1].err_u_l2 &&
                         table.rows[r].err_p_l2 < table.rows[r - 1].err_p_l2;
        }
    }
    if (max_err < 1e-12) {
        std::printf("errors below 1e-12 on every level: pass\n");
        return 0;
    }
    if (decreasing) {
        std::printf("velocity and pressure errors strictly decreasing: pass\n");
        return 0;
    }
    std::printf("errors not strictly decreasing: fail\n");
    return 3;
}

int cmd_consistency(const RunConfig& cfg) {
    std::function<double(Vec2)> ubar;
    if (cfg.field == "sinsin") {
        ubar = [](Vec2 x) {
            return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y);
        };
    } else if (cfg.field == "linear") {
        ubar = [](Vec2 x) { return 0.3 + 0.7 * x.x - 0.4 * x.y; };
    } else {
        fail(ErrorKind::UsageError, "unknown field '" + cfg.field + "', expected sinsin or linear");
    }
    const ViscosityField mu = parse_viscosity(cfg.mu_id.empty() ? "const:1" : cfg.mu_id);

    double l1[2] = {0.0, 0.0};
    double mx[2] = {0.0, 0.0};
    double h[2] = {0.0, 0.0};
    PrimalMesh current = load_primal(cfg.mesh);
    for (int level = 0; level < 2; ++level) {
        const MeshSet meshes = build_meshes(std::move(current));
        if (meshes.dual.n_interior() == 0) {
            fail(ErrorKind::UsageError, "mesh has no interior dual cells");
        }
        const DiscreteOps ops = build_ops(meshes, cell_viscosities(mu, meshes.primal));
        const std::vector<Vec2> defects = consistency_divergence_defect(meshes, ops, ubar);
        l1[level] = defect_l1(defects);
        mx[level] = defect_max(defects);
        h[level] = meshes.tri.h;
        std::printf("level %d: h=%.4e sum|defect|=%.6e max|defect|=%.6e\n", level, h[level],
                    l1[level], mx[level]);
        if (level == 0) current = refine_uniform(meshes.primal);
    }
    if (mx[1] < 1e-12) {
        std::printf("defects below 1e-12: exact\n");
        return 0;
    }
    const double order_l1 = std::log2(l1[0] / l1[1]);
    const double order_max = std::log2(mx[0] / mx[1]);
    std::printf("observed order (aggregate): %.3f\n", order_l1);
    std::printf("observed order (max): %.3f\n", order_max);
    if (order_l1 >= 1.6 && order_l1 <= 2.6) {
        std::printf("aggregate order within [1.6, 2.6]: pass\n");
        return 0;
    }
    std::printf("aggregate order outside [1.6, 2.6]: fail\n");
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalty cell-centered solver for variable-viscosity Stokes flow"};
    app.set_version_flag("--version", "pfecc 0.1.0");
    app.set_config("--config", "", "flat key=value configuration file");
    RunConfig cfg;
    app.add_option("--mesh", cfg.mesh, "mesh file path or quad:<n>")->capture_default_str();
    app.add_option("--case", cfg.case_id, "MS-1, MS-2, jump, zero, or solve-only:<fx>:<fy>")
        ->capture_default_str();
    app.add_option("--mu", cfg.mu_id,
                   "viscosity id (const:<v>, smooth, jump:<v1>:<v2>); solve-only and "
                   "consistency runs only");
    app.add_option("--lambda", cfg.lambda_pen, "pressure penalty scale, > 0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--levels", cfg.levels, "refinement levels for convergence studies")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_option("--field", cfg.field, "consistency field: sinsin or linear")
        ->capture_default_str();
    app.add_flag("--vtk", cfg.vtk, "also write solution.vtk");
    app.add_flag("--export-matrix", cfg.export_matrix,
                 "also write the assembled matrix in coordinate form");
    app.add_flag("--boundary-pressure", cfg.boundary_pressure,
                 "keep pressure unknowns on boundary dual cells");

    CLI::App* sc_check = app.add_subcommand("check-mesh", "build a mesh, print regularity report");
    CLI::App* sc_solve = app.add_subcommand("solve", "solve one case, write solution.csv");
    CLI::App* sc_conv = app.add_subcommand("convergence", "refinement study with error table");
    CLI::App* sc_cons = app.add_subcommand("consistency", "divergence consistency defect study");
    for (CLI::App* sc : {sc_check, sc_solve, sc_conv, sc_cons}) sc->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sc_check->parsed()) return cmd_check_mesh(cfg);
        if (sc_solve->parsed()) return cmd_solve(cfg);
        if (sc_conv->parsed()) return cmd_convergence(cfg);
        return cmd_consistency(cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
            case ErrorKind::UsageError:
            case ErrorKind::IoError:
            case ErrorKind::ParseError:
                return 2;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
