#pragma once

#include <Eigen/Sparse>
#include <string>

#include "pfecc/assembly.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"

namespace pfecc {

struct SolveReport {
    Eigen::VectorXd x;
    double rel_residual = 0.0;
    double wall_seconds = 0.0;
    int n = 0;
    std::string method;
};

/// Sparse direct solve of the full symmetric indefinite system; relative
/// residual below 1e-10 or NumericalBreakdown.
SolveReport solve_direct(const GlobalSystem& system);

/// Top-left 2|M| x 2|M| velocity block.
Eigen::SparseMatrix<double> velocity_block(const GlobalSystem& system);

struct SpdReport {
    bool is_spd = false;
    double min_eigenvalue = 0.0;
    int iterations = 0;
};

/// Symmetric positive-definite factorization check plus an inverse-iteration
/// estimate of the smallest eigenvalue (1e-6 relative, at most 50 iterations).
SpdReport check_spd(const Eigen::SparseMatrix<double>& B);

/// Smallest generalized singular value of the divergence operator against the
/// H1 Gram matrix of the linear interpolant: the discrete inf-sup constant.
/// The pressure space is restricted to zero mean (unless it is 1-dimensional,
/// where the raw quotient is returned). Dense; MeshTooLarge above 500 cells.
double infsup_estimate(const MeshSet& meshes, const DiscreteOps& ops);

}  // namespace pfecc
