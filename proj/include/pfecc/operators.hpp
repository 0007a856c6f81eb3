#pragma once

#include <optional>
#include <vector>

#include "pfecc/geom.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/viscosity.hpp"

namespace pfecc {

/// Weights expressing the edge value u_sigma as a combination of the three
/// triangle unknowns: u_sigma = beta_k u_K + beta_l u_L + beta_vertex u_{K*}.
/// beta_vertex is computed as 1 - (beta_k + beta_l); with that grouping the
/// partition of unity beta_k + beta_l + beta_vertex == 1 holds bitwise in
/// floating point whenever beta_k + beta_l falls in [0, 2], i.e. away from
/// the flux-matching degeneracy.
struct TransmissionCoefficients {
    double beta_k = 0.0;
    double beta_l = 0.0;
    double beta_vertex = 0.0;
    double denom = 0.0;  ///< flux-matching denominator, checked against degeneracy
};

/// Constant-gradient map on one sub-triangle half: the gradient of a scalar
/// nodal field is g_k*u_K + g_l*u_L + g_vertex*u_{K*}.
struct HalfGradient {
    int cell = -1;     ///< owning primal cell
    double area = 0.0;
    double mu = 0.0;   ///< cell-average viscosity of the owning cell
    Vec2 g_k{};
    Vec2 g_l{};
    Vec2 g_vertex{};
};

/// Discrete operators attached to one sub-triangle.
struct SubTriOps {
    TransmissionCoefficients beta;  ///< meaningful for interior edges only
    HalfGradient half_k;
    std::optional<HalfGradient> half_l;
};

/// Per-sub-triangle operator data for a whole mesh, aligned with tri.tris.
struct DiscreteOps {
    std::vector<SubTriOps> tri_ops;
    std::vector<double> mu_cells;
};

/// Cell-centered velocity plus vertex velocities; boundary vertices are 0.
struct DiscreteVelocity {
    std::vector<Vec2> cell;
    std::vector<Vec2> vertex;
};

/// Piecewise-constant pressure per dual cell (inactive duals hold 0).
struct DiscretePressure {
    std::vector<double> dual;
};

/// Flux-matching weights across the interface [x_sigma, x_vertex]. Throws
/// HypothesisViolation when the denominator degenerates.
TransmissionCoefficients beta_coefficients(const SubTri& tri, double mu_k, double mu_l);

/// Gradient maps for both halves (one half for boundary edges, where the edge
/// value is pinned to zero instead of carrying weights).
SubTriOps subtri_ops(const SubTri& tri, double mu_k, double mu_l);

DiscreteOps build_ops(const MeshSet& meshes, std::vector<double> mu_cells);

inline Vec2 half_gradient(const HalfGradient& g, double u_k, double u_l, double u_vertex) {
    return g.g_k * u_k + g.g_l * u_l + g.g_vertex * u_vertex;
}

/// u_sigma for nodal values on one sub-triangle (0 on boundary edges).
double sigma_value(const SubTri& tri, const SubTriOps& ops, double u_k, double u_l, double u_vertex);

/// |mu_K grad_K . n^K + mu_L grad_L . n^L| on the interface [x_sigma, x_vertex];
/// zero up to rounding by construction of the weights.
double flux_residual(const SubTri& tri, const SubTriOps& ops, double u_k, double u_l, double u_vertex);

/// Divergence on one half for vector nodal values.
inline double half_divergence(const HalfGradient& g, Vec2 u_k, Vec2 u_l, Vec2 u_vertex) {
    return g.g_k.x * u_k.x + g.g_l.x * u_l.x + g.g_vertex.x * u_vertex.x +
           g.g_k.y * u_k.y + g.g_l.y * u_l.y + g.g_vertex.y * u_vertex.y;
}

/// Scheme interpolant: piecewise linear on sub-triangle halves, matching the
/// nodal values and the flux-matching edge values. Throws PointOutsideDomain.
Vec2 interpolate_P(const MeshSet& meshes, const DiscreteOps& ops, const DiscreteVelocity& u, Vec2 x);

/// Standard linear interpolant on the third-mesh triangulation.
Vec2 interpolate_P1(const MeshSet& meshes, const DiscreteVelocity& u, Vec2 x);

/// Nodal sampler: u_K at cell centers, u_{K*} at vertices (boundary included).
DiscreteVelocity sample_velocity(const MeshSet& meshes, const std::function<Vec2(Vec2)>& u);

}  // namespace pfecc
