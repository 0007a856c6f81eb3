#include "pfecc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pfecc/errors.hpp"
#include "pfecc/parallel.hpp"

namespace pfecc {

TransmissionCoefficients beta_coefficients(const SubTri& tri, double mu_k, double mu_l) {
    if (!tri.interior()) {
        fail(ErrorKind::UsageError, "flux-matching weights exist only on interior edges");
    }
    const HalfTri& hk = tri.half_k;
    const HalfTri& hl = *tri.half_l;

    // Interface normals n^K, n^L along [x_sigma, x_vertex], one per side.
    const double t_k = mu_k * norm2(hk.n_sigma_vertex) / (2.0 * hk.area);
    const double t_l = mu_l * norm2(hl.n_sigma_vertex) / (2.0 * hl.area);
    const double term_k = -mu_k * dot(hk.n_sigma_vertex, hk.n_vertex_cell) / (2.0 * hk.area);
    const double term_l = -mu_l * dot(hl.n_sigma_vertex, hl.n_vertex_cell) / (2.0 * hl.area);
    const double denom = term_k + term_l;
    if (std::abs(denom) <= 1e-12 * (std::abs(term_k) + std::abs(term_l))) {
        fail(ErrorKind::HypothesisViolation,
             "flux-matching denominator degenerates on edge " + std::to_string(tri.edge));
    }

    TransmissionCoefficients c;
    c.beta_k = t_k / denom;
    c.beta_l = t_l / denom;
    // Grouping matters: rounding 1 - (beta_k + beta_l) makes the three
    // weights sum to exactly 1.0 whenever beta_k + beta_l lies in [0, 2]
    // (Sterbenz on [0.5, 2], sub-half-ulp error below 0.5), which covers
    // every configuration a well-shaped mesh produces.
    c.beta_vertex = 1.0 - (c.beta_k + c.beta_l);
    c.denom = denom;
    return c;
}

namespace {

HalfGradient make_half_gradient(const HalfTri& h, double mu, const TransmissionCoefficients* beta,
                                bool is_k_side) {
    HalfGradient g;
    g.cell = h.cell;
    g.area = h.area;
    g.mu = mu;
    const double inv = -1.0 / (2.0 * h.area);
    if (beta == nullptr) {
        // Boundary edge: u_sigma = 0, the n_vertex_cell weight drops out.
        g.g_k = h.n_sigma_vertex * inv;
        g.g_l = Vec2{};
        g.g_vertex = h.n_cell_sigma * inv;
        return g;
    }
    // Own cell value pairs with the [x_sigma, x_vertex] normal, the vertex
    // value with the [x_cell, x_sigma] normal, u_sigma with [x_vertex, x_cell].
    const Vec2 via_sigma_k = h.n_vertex_cell * beta->beta_k;
    const Vec2 via_sigma_l = h.n_vertex_cell * beta->beta_l;
    const Vec2 via_sigma_v = h.n_vertex_cell * beta->beta_vertex;
    if (is_k_side) {
        g.g_k = (via_sigma_k + h.n_sigma_vertex) * inv;
        g.g_l = via_sigma_l * inv;
    } else {
        g.g_k = via_sigma_k * inv;
        g.g_l = (via_sigma_l + h.n_sigma_vertex) * inv;
    }
    g.g_vertex = (via_sigma_v + h.n_cell_sigma) * inv;
    return g;
}

}  // namespace

SubTriOps subtri_ops(const SubTri& tri, double mu_k, double mu_l) {
    SubTriOps ops;
    if (tri.interior()) {
        ops.beta = beta_coefficients(tri, mu_k, mu_l);
        ops.half_k = make_half_gradient(tri.half_k, mu_k, &ops.beta, true);
        ops.half_l = make_half_gradient(*tri.half_l, mu_l, &ops.beta, false);
    } else {
        ops.half_k = make_half_gradient(tri.half_k, mu_k, nullptr, true);
    }
    return ops;
}

DiscreteOps build_ops(const MeshSet& meshes, std::vector<double> mu_cells) {
    DiscreteOps ops;
    ops.mu_cells = std::move(mu_cells);
    ops.tri_ops.resize(meshes.tri.tris.size());
    parallel_for(meshes.tri.tris.size(), [&](std::size_t t) {
        const SubTri& st = meshes.tri.tris[t];
        const double mu_k = ops.mu_cells[static_cast<std::size_t>(st.k)];
        const double mu_l = st.interior() ? ops.mu_cells[static_cast<std::size_t>(st.l)] : 0.0;
        ops.tri_ops[t] = subtri_ops(st, mu_k, mu_l);
    });
    return ops;
}

double sigma_value(const SubTri& tri, const SubTriOps& ops, double u_k, double u_l, double u_vertex) {
    if (!tri.interior()) return 0.0;
    return ops.beta.beta_k * u_k + ops.beta.beta_l * u_l + ops.beta.beta_vertex * u_vertex;
}

double flux_residual(const SubTri& tri, const SubTriOps& ops, double u_k, double u_l, double u_vertex) {
    if (!tri.interior()) return 0.0;
    const Vec2 grad_k = half_gradient(ops.half_k, u_k, u_l, u_vertex);
    const Vec2 grad_l = half_gradient(*ops.half_l, u_k, u_l, u_vertex);
    return std::abs(ops.half_k.mu * dot(grad_k, tri.half_k.n_sigma_vertex) +
                    ops.half_l->mu * dot(grad_l, tri.half_l->n_sigma_vertex));
}

namespace {

struct Located {
    int tri = -1;
    bool k_side = true;
    std::array<double, 3> bary{};  ///< (vertex, cell, sigma)
};

Located locate_half(const MeshSet& meshes, Vec2 x) {
    Located best;
    double best_min = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < meshes.tri.tris.size(); ++t) {
        const SubTri& st = meshes.tri.tris[t];
        const int sides = st.interior() ? 2 : 1;
        for (int side = 0; side < sides; ++side) {
            const Vec2 xc = side == 0 ? st.x_k : st.x_l;
            const auto b = barycentric(x, st.x_vertex, xc, st.x_sigma);
            const double mn = std::min({b[0], b[1], b[2]});
            if (mn > best_min) {
                best_min = mn;
                best = Located{static_cast<int>(t), side == 0, b};
            }
        }
    }
    if (best_min < -1e-12) {
        fail(ErrorKind::PointOutsideDomain, "point not covered by any sub-triangle");
    }
    return best;
}

}  // namespace

Vec2 interpolate_P(const MeshSet& meshes, const DiscreteOps& ops, const DiscreteVelocity& u, Vec2 x) {
    const Located at = locate_half(meshes, x);
    const SubTri& st = meshes.tri.tris[static_cast<std::size_t>(at.tri)];
    const SubTriOps& op = ops.tri_ops[static_cast<std::size_t>(at.tri)];
    const Vec2 u_k = u.cell[static_cast<std::size_t>(st.k)];
    const Vec2 u_l = st.interior() ? u.cell[static_cast<std::size_t>(st.l)] : Vec2{};
    const Vec2 u_v = u.vertex[static_cast<std::size_t>(st.vertex)];
    const Vec2 u_sigma{sigma_value(st, op, u_k.x, u_l.x, u_v.x),
                       sigma_value(st, op, u_k.y, u_l.y, u_v.y)};
    const Vec2 u_cell = at.k_side ? u_k : u_l;
    return u_v * at.bary[0] + u_cell * at.bary[1] + u_sigma * at.bary[2];
}

Vec2 interpolate_P1(const MeshSet& meshes, const DiscreteVelocity& u, Vec2 x) {
    const int nc = meshes.primal.n_cells();
    auto node_point = [&](int n) {
        return n < nc ? meshes.primal.centers[static_cast<std::size_t>(n)]
                      : meshes.primal.vertices[static_cast<std::size_t>(n - nc)];
    };
    auto node_value = [&](int n) {
        return n < nc ? u.cell[static_cast<std::size_t>(n)]
                      : u.vertex[static_cast<std::size_t>(n - nc)];
    };
    double best_min = -std::numeric_limits<double>::infinity();
    std::array<int, 3> best_el{};
    std::array<double, 3> best_b{};
    for (const auto& el : meshes.tri.p1_elements) {
        const auto b = barycentric(x, node_point(el[0]), node_point(el[1]), node_point(el[2]));
        const double mn = std::min({b[0], b[1], b[2]});
        if (mn > best_min) {
            best_min = mn;
            best_el = el;
            best_b = b;
        }
    }
    if (best_min < -1e-12) {
        fail(ErrorKind::PointOutsideDomain, "point not covered by the triangulation");
    }
    return node_value(best_el[0]) * best_b[0] + node_value(best_el[1]) * best_b[1] +
           node_value(best_el[2]) * best_b[2];
}

DiscreteVelocity sample_velocity(const MeshSet& meshes, const std::function<Vec2(Vec2)>& u) {
    DiscreteVelocity v;
    v.cell.resize(static_cast<std::size_t>(meshes.primal.n_cells()));
    v.vertex.resize(static_cast<std::size_t>(meshes.primal.n_vertices()));
    for (int k = 0; k < meshes.primal.n_cells(); ++k) {
        v.cell[static_cast<std::size_t>(k)] = u(meshes.primal.centers[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < meshes.primal.n_vertices(); ++i) {
        v.vertex[static_cast<std::size_t>(i)] = u(meshes.primal.vertices[static_cast<std::size_t>(i)]);
    }
    return v;
}

}  // namespace pfecc
