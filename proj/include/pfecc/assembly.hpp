#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"

namespace pfecc {

/// Load moments of f against the scheme's interpolation basis, one 2-vector
/// per basis function. Vertex moments are kept for every vertex; only the
/// interior ones enter the system (boundary velocities are pinned).
struct Loads {
    std::vector<Vec2> cell_moment;
    std::vector<Vec2> vertex_moment;
};

Loads assemble_rhs(const MeshSet& meshes, const DiscreteOps& ops,
                   const std::function<Vec2(Vec2)>& f);

/// Local solve at one interior vertex: the vertex momentum equations have the
/// diagonal matrix alpha*I2, so
///   u_vertex[c] = (f_moment[c] - sum_j cell_coeffs[j] u_j[c] + d[c] p) / alpha.
struct EliminationRecord {
    int vertex = -1;
    double alpha = 0.0;  ///< diagonal of the 2x2 local matrix
    double cond = 1.0;   ///< condition number of that matrix (alpha*I2: 1)
    std::vector<std::pair<int, double>> cell_coeffs;  ///< sorted by cell id
    Vec2 d{};            ///< divergence moments of the vertex basis
    Vec2 f_moment{};
};

EliminationRecord local_vertex_elimination(const MeshSet& meshes, const DiscreteOps& ops,
                                           const Loads& loads, int vertex);

/// Sparse symmetric system over cell velocities and dual-cell pressures.
/// Velocity dof (cell k, component c) sits at row 2k+c; pressure slot i at
/// 2*n_cells + i. The pressure block is diagonal.
struct GlobalSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd F;
    int n_cells = 0;
    std::vector<int> pressure_ids;     ///< vertex id per pressure slot
    std::vector<int> pressure_slot;    ///< vertex id -> slot or -1
    std::vector<EliminationRecord> records;  ///< one per interior vertex, in interior order
    double lambda_pen = 1.0;
    double h = 0.0;

    int n_rows() const { return 2 * n_cells + static_cast<int>(pressure_ids.size()); }
    int velocity_row(int cell, int comp) const { return 2 * cell + comp; }
    int pressure_row(int slot) const { return 2 * n_cells + slot; }
};

/// Assembles the reduced system: vertex velocities eliminated through their
/// momentum equations, the per-dual-cell penalty/divergence equation kept as
/// the (negated, symmetry-preserving) pressure row. With boundary_pressure,
/// boundary dual cells also carry pressure unknowns.
GlobalSystem assemble_global(const MeshSet& meshes, const DiscreteOps& ops, const Loads& loads,
                             double lambda_pen, bool boundary_pressure = false);

/// Vertex velocities reconstructed from the solved system.
DiscreteVelocity recover_vertex_velocities(const MeshSet& meshes, const GlobalSystem& system,
                                           const Eigen::VectorXd& x);

/// Pressure vector over all vertices (inactive dual cells hold 0).
DiscretePressure extract_pressure(const MeshSet& meshes, const GlobalSystem& system,
                                  const Eigen::VectorXd& x);

/// Coordinate text export: "row col value" sorted by row then column.
void write_matrix(const Eigen::SparseMatrix<double>& A, const std::string& path);

}  // namespace pfecc
