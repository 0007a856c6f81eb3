#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pfecc/assembly.hpp"
#include "pfecc/linsolve.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"
#include "pfecc/viscosity.hpp"

namespace pfecc {

/// Closed-form Stokes solution with its forcing, on the unit square with
/// homogeneous Dirichlet velocity and zero-mean pressure.
struct ManufacturedCase {
    std::string name;
    std::function<Vec2(Vec2)> u;
    std::function<std::array<Vec2, 2>(Vec2)> grad_u;  ///< gradient per component
    std::function<double(Vec2)> p;
    ViscosityField mu;
    std::function<Vec2(Vec2)> f;
};

/// Built-in ids: MS-1 (constant viscosity), MS-2 (smooth viscosity), jump
/// (viscosity step at x = 0.5, interface velocity flattened), zero.
ManufacturedCase make_case(const std::string& id);

/// L2 distance between the scheme interpolant of u_h and the exact velocity,
/// 3-point Gauss per sub-triangle half.
double l2_error_velocity(const MeshSet& meshes, const DiscreteOps& ops, const DiscreteVelocity& u,
                         const std::function<Vec2(Vec2)>& exact);

/// L2 distance between the dual-cell pressure and the exact pressure over the
/// interior dual cells, both shifted to zero mean there.
double l2_error_pressure(const MeshSet& meshes, const DiscretePressure& p,
                         const std::function<double(Vec2)>& exact);

/// Full H1 norm (seminorm plus L2) of the linear interpolant of u_h.
double h1disc_norm(const MeshSet& meshes, const DiscreteVelocity& u);

/// Broken H1 distance between the linear interpolant of u_h and the exact
/// velocity.
double h1disc_error(const MeshSet& meshes, const DiscreteVelocity& u,
                    const std::function<Vec2(Vec2)>& exact,
                    const std::function<std::array<Vec2, 2>(Vec2)>& grad_exact);

/// Per-dual-cell mismatch (one value per component) between the integrated
/// discrete partial derivatives of the nodal sample of ubar and the exact
/// boundary flux, the latter by 5-point Gauss per boundary piece. Interior
/// dual cells only; entries for boundary vertices stay zero because their
/// pinned wall values would measure the boundary data, not the operator.
std::vector<Vec2> consistency_divergence_defect(const MeshSet& meshes, const DiscreteOps& ops,
                                                const std::function<double(Vec2)>& ubar);

double defect_l1(const std::vector<Vec2>& defects);
double defect_max(const std::vector<Vec2>& defects);

/// Per-dual-cell penalty identity: max residual of
/// integral(div u_h) = -lambda h m(K*) p over the active dual cells, relative
/// to the unsigned mass of the divergence terms (backward-relative: the
/// integral cancels down to the tiny penalty target, so rounding noise is
/// judged against the summand size, not the cancelled value).
double penalty_identity_residual(const MeshSet& meshes, const DiscreteOps& ops,
                                 const GlobalSystem& system, const DiscreteVelocity& u,
                                 const DiscretePressure& p);

/// One full solve on an already built mesh.
struct CaseSolution {
    DiscreteOps ops;
    GlobalSystem system;
    SolveReport report;
    DiscreteVelocity u;
    DiscretePressure p;
};

CaseSolution solve_case(const MeshSet& meshes, const ManufacturedCase& mc, double lambda_pen,
                        bool boundary_pressure = false);

struct ConvergenceRow {
    double h = 0.0;
    int dof = 0;
    double err_u_l2 = 0.0;
    double err_p_l2 = 0.0;
    double err_u_h1 = 0.0;
    double ord_u_l2 = 0.0;  ///< NaN on the first row
    double ord_p_l2 = 0.0;
    double ord_u_h1 = 0.0;
    double sol_h1 = 0.0;    ///< H1 norm of the solution (not serialized)
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Uniform-refinement study; levels >= 3.
ConvergenceTable run_convergence(const ManufacturedCase& mc, const PrimalMesh& base, int levels,
                                 double lambda_pen, bool boundary_pressure = false);

/// CSV with 10 significant digits; order cells empty on the first row.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

}  // namespace pfecc
