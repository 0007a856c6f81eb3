#include "pfecc/linsolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <random>

#include "pfecc/errors.hpp"

namespace pfecc {

SolveReport solve_direct(const GlobalSystem& system) {
    const auto start = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.n = system.n_rows();
    rep.method = "sparse-lu";

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(system.A);
    lu.factorize(system.A);
    if (lu.info() != Eigen::Success) {
        fail(ErrorKind::SingularMatrix, "factorization failed: " + lu.lastErrorMessage());
    }
    rep.x = lu.solve(system.F);
    if (lu.info() != Eigen::Success) {
        fail(ErrorKind::NumericalBreakdown, "triangular solve failed");
    }

    const double fnorm = system.F.norm();
    const double rnorm = (system.A * rep.x - system.F).norm();
    rep.rel_residual = fnorm > 0.0 ? rnorm / fnorm : rnorm;
    if (!(rep.rel_residual < 1e-10)) {
        fail(ErrorKind::NumericalBreakdown,
             "solve residual " + std::to_string(rep.rel_residual) + " exceeds contract");
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

Eigen::SparseMatrix<double> velocity_block(const GlobalSystem& system) {
    const int n = 2 * system.n_cells;
    Eigen::SparseMatrix<double> B(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int outer = 0; outer < system.A.outerSize() && outer < n; ++outer) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, outer); it; ++it) {
            if (it.row() < n && it.col() < n) {
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
            }
        }
    }
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    return B;
}

SpdReport check_spd(const Eigen::SparseMatrix<double>& B) {
    SpdReport rep;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(B);
    if (llt.info() != Eigen::Success) {
        rep.is_spd = false;
        rep.min_eigenvalue = std::nan("");
        return rep;
    }
    rep.is_spd = true;

    // Inverse iteration with the existing factorization; the dominant mode of
    // B^{-1} is the smallest eigenvalue of B. The start vector must overlap
    // every eigenspace — a constant vector can be exactly orthogonal to the
    // lowest mode — so fill it from a fixed-seed generator.
    std::mt19937_64 rng(0x5851F42D4C957F2DULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd v(B.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
    v.normalize();
    double lambda = 0.0;
    for (rep.iterations = 1; rep.iterations <= 50; ++rep.iterations) {
        Eigen::VectorXd y = llt.solve(v);
        const double ynorm = y.norm();
        if (!(ynorm > 0.0)) break;
        v = y / ynorm;
        const double next = v.dot(B * v);
        if (rep.iterations > 1 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    rep.min_eigenvalue = lambda;
    return rep;
}

namespace {

/// P1 element matrices on (p0, p1, p2): stiffness area*grad_i.grad_j and the
/// exact mass matrix area/12 * (1 + delta_ij).
void p1_element(const Vec2& p0, const Vec2& p1, const Vec2& p2, Eigen::Matrix3d& k_el,
                Eigen::Matrix3d& m_el) {
    const double a2 = triangle_signed_area(p0, p1, p2) * 2.0;
    const double bx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double by[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    const double area = std::abs(a2) / 2.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            k_el(i, j) = area * (bx[i] * bx[j] + by[i] * by[j]) / (a2 * a2);
            m_el(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);
        }
    }
}

}  // namespace

double infsup_estimate(const MeshSet& meshes, const DiscreteOps& ops) {
    const auto& primal = meshes.primal;
    const auto& dual = meshes.dual;
    if (primal.n_cells() > 500) {
        fail(ErrorKind::MeshTooLarge, "inf-sup estimate is dense; use at most 500 cells");
    }

    const int nc = primal.n_cells();
    const int nv = primal.n_vertices();
    // Velocity dofs: two components per cell and per interior vertex.
    std::vector<int> vertex_slot(static_cast<std::size_t>(nv), -1);
    int n_free_vertices = 0;
    for (int v : dual.interior_ids) vertex_slot[static_cast<std::size_t>(v)] = n_free_vertices++;
    const int ndof = 2 * (nc + n_free_vertices);
    auto cell_dof = [](int k, int c) { return 2 * k + c; };
    auto vertex_dof = [&](int slot, int c) { return 2 * nc + 2 * slot + c; };

    const int np = dual.n_interior();
    if (np == 0) fail(ErrorKind::EmptySystem, "no pressure unknowns for the inf-sup estimate");

    // Raw divergence rows: integral of div v over each interior dual cell.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(np, ndof);
    for (int row = 0; row < np; ++row) {
        const int v = dual.interior_ids[static_cast<std::size_t>(row)];
        for (int t : meshes.tri.by_dual[static_cast<std::size_t>(v)]) {
            const SubTri& st = meshes.tri.tris[static_cast<std::size_t>(t)];
            const SubTriOps& op = ops.tri_ops[static_cast<std::size_t>(t)];
            const int vslot = vertex_slot[static_cast<std::size_t>(st.vertex)];
            auto add_half = [&](const HalfGradient& g) {
                for (int c = 0; c < 2; ++c) {
                    const double gk = c == 0 ? g.g_k.x : g.g_k.y;
                    const double gl = c == 0 ? g.g_l.x : g.g_l.y;
                    const double gv = c == 0 ? g.g_vertex.x : g.g_vertex.y;
                    D(row, cell_dof(st.k, c)) += g.area * gk;
                    if (st.interior()) D(row, cell_dof(st.l, c)) += g.area * gl;
                    if (vslot >= 0) D(row, vertex_dof(vslot, c)) += g.area * gv;
                }
            };
            add_half(op.half_k);
            if (st.interior()) add_half(*op.half_l);
        }
    }

    // H1 Gram matrix of the linear interpolant, block diagonal over the two
    // components; boundary vertices are pinned and drop out.
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ndof, ndof);
    Eigen::Matrix3d k_el;
    Eigen::Matrix3d m_el;
    for (const auto& el : meshes.tri.p1_elements) {
        Vec2 pts[3];
        int dof0[3];
        for (int i = 0; i < 3; ++i) {
            const int n = el[static_cast<std::size_t>(i)];
            if (n < nc) {
                pts[i] = primal.centers[static_cast<std::size_t>(n)];
                dof0[i] = cell_dof(n, 0);
            } else {
                const int v = n - nc;
                pts[i] = primal.vertices[static_cast<std::size_t>(v)];
                const int slot = vertex_slot[static_cast<std::size_t>(v)];
                dof0[i] = slot >= 0 ? vertex_dof(slot, 0) : -1;
            }
        }
        p1_element(pts[0], pts[1], pts[2], k_el, m_el);
        for (int i = 0; i < 3; ++i) {
            if (dof0[i] < 0) continue;
            for (int j = 0; j < 3; ++j) {
                if (dof0[j] < 0) continue;
                const double w = k_el(i, j) + m_el(i, j);
                X(dof0[i], dof0[j]) += w;
                X(dof0[i] + 1, dof0[j] + 1) += w;
            }
        }
    }

    // S = D X^{-1} D^T, scaled by the pressure mass, then the smallest
    // eigenvalue over the zero-mean pressure subspace.
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::NumericalBreakdown, "interpolant Gram matrix is not positive definite");
    }
    const Eigen::MatrixXd S = D * llt.solve(D.transpose());

    Eigen::VectorXd msqrt(np);
    for (int i = 0; i < np; ++i) {
        msqrt[i] = std::sqrt(dual.areas[static_cast<std::size_t>(dual.interior_ids[static_cast<std::size_t>(i)])]);
    }
    Eigen::MatrixXd s_tilde = S;
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) s_tilde(i, j) /= msqrt[i] * msqrt[j];
    }

    if (np == 1) {
        return std::sqrt(std::max(s_tilde(0, 0), 0.0));
    }

    // Deflate the constant pressure (the gauge mode): Householder basis of
    // the complement of z = M^{1/2} 1.
    Eigen::VectorXd z = msqrt / msqrt.norm();
    Eigen::VectorXd w = z;
    w[0] += z[0] >= 0.0 ? 1.0 : -1.0;
    w.normalize();
    Eigen::MatrixXd house = Eigen::MatrixXd::Identity(np, np) - 2.0 * w * w.transpose();
    const Eigen::MatrixXd basis = house.rightCols(np - 1);
    const Eigen::MatrixXd reduced = basis.transpose() * s_tilde * basis;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    if (eig.info() != Eigen::Success) {
        fail(ErrorKind::NumericalBreakdown, "eigenvalue solve failed");
    }
    return std::sqrt(std::max(eig.eigenvalues().minCoeff(), 0.0));
}

}  // namespace pfecc
