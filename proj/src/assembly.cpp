#include "pfecc/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "pfecc/errors.hpp"
#include "pfecc/parallel.hpp"

namespace pfecc {

namespace {

/// Basis weights of the three nodal functions at one quadrature point of one
/// half, edge-value weights folded in: interior edges blend the flux-matching
/// combination, boundary edges pin the edge value to zero.
struct HalfBasis {
    double w_k, w_l, w_vertex;
};

HalfBasis basis_at(const SubTri& st, const SubTriOps& op, bool k_side, const std::array<double, 3>& l) {
    if (!st.interior()) {
        return {l[1], 0.0, l[0]};
    }
    const auto& b = op.beta;
    if (k_side) {
        return {l[1] + l[2] * b.beta_k, l[2] * b.beta_l, l[0] + l[2] * b.beta_vertex};
    }
    return {l[2] * b.beta_k, l[1] + l[2] * b.beta_l, l[0] + l[2] * b.beta_vertex};
}

struct TriMoment {
    Vec2 to_k{};
    Vec2 to_l{};
    Vec2 to_vertex{};
};

}  // namespace

Loads assemble_rhs(const MeshSet& meshes, const DiscreteOps& ops,
                   const std::function<Vec2(Vec2)>& f) {
    const auto& tris = meshes.tri.tris;
    std::vector<TriMoment> slots(tris.size());
    parallel_for(tris.size(), [&](std::size_t t) {
        const SubTri& st = tris[t];
        const SubTriOps& op = ops.tri_ops[t];
        TriMoment m;
        const int sides = st.interior() ? 2 : 1;
        for (int side = 0; side < sides; ++side) {
            const bool k_side = side == 0;
            const Vec2 xc = k_side ? st.x_k : st.x_l;
            const double area = k_side ? st.half_k.area : st.half_l->area;
            for (const auto& g : kTriGauss3) {
                const Vec2 x = st.x_vertex * g[0] + xc * g[1] + st.x_sigma * g[2];
                const Vec2 fx = f(x);
                const HalfBasis w = basis_at(st, op, k_side, g);
                const double scale = area / 3.0;
                m.to_k += fx * (w.w_k * scale);
                m.to_l += fx * (w.w_l * scale);
                m.to_vertex += fx * (w.w_vertex * scale);
            }
        }
        slots[t] = m;
    });

    Loads loads;
    loads.cell_moment.assign(static_cast<std::size_t>(meshes.primal.n_cells()), Vec2{});
    loads.vertex_moment.assign(static_cast<std::size_t>(meshes.primal.n_vertices()), Vec2{});
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const SubTri& st = tris[t];
        loads.cell_moment[static_cast<std::size_t>(st.k)] += slots[t].to_k;
        if (st.interior()) loads.cell_moment[static_cast<std::size_t>(st.l)] += slots[t].to_l;
        loads.vertex_moment[static_cast<std::size_t>(st.vertex)] += slots[t].to_vertex;
    }
    return loads;
}

EliminationRecord local_vertex_elimination(const MeshSet& meshes, const DiscreteOps& ops,
                                           const Loads& loads, int vertex) {
    if (meshes.dual.on_boundary[static_cast<std::size_t>(vertex)]) {
        fail(ErrorKind::UsageError, "vertex " + std::to_string(vertex) + " velocity is pinned");
    }
    EliminationRecord rec;
    rec.vertex = vertex;
    rec.f_moment = loads.vertex_moment[static_cast<std::size_t>(vertex)];

    double scale = 0.0;
    std::map<int, double> coeffs;
    for (int t : meshes.tri.by_dual[static_cast<std::size_t>(vertex)]) {
        const SubTri& st = meshes.tri.tris[static_cast<std::size_t>(t)];
        const SubTriOps& op = ops.tri_ops[static_cast<std::size_t>(t)];
        auto add_half = [&](const HalfGradient& g) {
            const double w = g.mu * g.area;
            rec.alpha += w * norm2(g.g_vertex);
            coeffs[st.k] += w * dot(g.g_vertex, g.g_k);
            if (st.interior()) coeffs[st.l] += w * dot(g.g_vertex, g.g_l);
            rec.d += g.g_vertex * g.area;
            scale += w * (norm2(g.g_k) + norm2(g.g_l) + norm2(g.g_vertex));
        };
        add_half(op.half_k);
        if (st.interior()) add_half(*op.half_l);
    }
    if (!(rec.alpha > 1e-14 * scale)) {
        fail(ErrorKind::SingularLocalSystem,
             "vertex block degenerates at vertex " + std::to_string(vertex));
    }
    rec.cond = 1.0;
    rec.cell_coeffs.assign(coeffs.begin(), coeffs.end());
    return rec;
}

GlobalSystem assemble_global(const MeshSet& meshes, const DiscreteOps& ops, const Loads& loads,
                             double lambda_pen, bool boundary_pressure) {
    if (lambda_pen <= 0.0) fail(ErrorKind::UsageError, "penalty parameter must be positive");
    const auto& primal = meshes.primal;
    const auto& dual = meshes.dual;
    const auto& tris = meshes.tri.tris;
    const int nc = primal.n_cells();
    const int nv = primal.n_vertices();

    GlobalSystem sys;
    sys.n_cells = nc;
    sys.lambda_pen = lambda_pen;
    sys.h = meshes.tri.h;
    sys.pressure_slot.assign(static_cast<std::size_t>(nv), -1);
    for (int v = 0; v < nv; ++v) {
        if (!dual.on_boundary[static_cast<std::size_t>(v)] || boundary_pressure) {
            sys.pressure_slot[static_cast<std::size_t>(v)] = static_cast<int>(sys.pressure_ids.size());
            sys.pressure_ids.push_back(v);
        }
    }
    const int n_rows = sys.n_rows();
    if (n_rows == 0) fail(ErrorKind::EmptySystem, "mesh yields no unknowns");

    // Interior-vertex eliminations, independent per vertex.
    const auto& interior = dual.interior_ids;
    sys.records.resize(interior.size());
    parallel_for(interior.size(), [&](std::size_t i) {
        sys.records[i] = local_vertex_elimination(meshes, ops, loads, interior[i]);
    });
    std::vector<int> record_of(static_cast<std::size_t>(nv), -1);
    for (std::size_t i = 0; i < interior.size(); ++i) {
        record_of[static_cast<std::size_t>(interior[i])] = static_cast<int>(i);
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(tris.size() * 16);
    sys.F = Eigen::VectorXd::Zero(n_rows);

    // Cell-cell viscous couplings, one block of two identical components per
    // half; vertex couplings are folded through the elimination below.
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const SubTri& st = tris[t];
        const SubTriOps& op = ops.tri_ops[t];
        auto add_half = [&](const HalfGradient& g) {
            const double w = g.mu * g.area;
            const double w_kk = w * norm2(g.g_k);
            for (int c = 0; c < 2; ++c) trip.emplace_back(2 * st.k + c, 2 * st.k + c, w_kk);
            if (st.interior()) {
                const double w_kl = w * dot(g.g_k, g.g_l);
                const double w_ll = w * norm2(g.g_l);
                for (int c = 0; c < 2; ++c) {
                    trip.emplace_back(2 * st.k + c, 2 * st.l + c, w_kl);
                    trip.emplace_back(2 * st.l + c, 2 * st.k + c, w_kl);
                    trip.emplace_back(2 * st.l + c, 2 * st.l + c, w_ll);
                }
            }
        };
        add_half(op.half_k);
        if (st.interior()) add_half(*op.half_l);
    }

    // Load moments on cell rows.
    for (int k = 0; k < nc; ++k) {
        sys.F[2 * k] = loads.cell_moment[static_cast<std::size_t>(k)].x;
        sys.F[2 * k + 1] = loads.cell_moment[static_cast<std::size_t>(k)].y;
    }

    // Vertex elimination: Schur correction of the velocity block and of the
    // cell-row load moments.
    for (const EliminationRecord& rec : sys.records) {
        const double inv_alpha = 1.0 / rec.alpha;
        for (const auto& [i, ci] : rec.cell_coeffs) {
            for (const auto& [j, cj] : rec.cell_coeffs) {
                const double w = -ci * cj * inv_alpha;
                trip.emplace_back(2 * i, 2 * j, w);
                trip.emplace_back(2 * i + 1, 2 * j + 1, w);
            }
            sys.F[2 * i] -= ci * rec.f_moment.x * inv_alpha;
            sys.F[2 * i + 1] -= ci * rec.f_moment.y * inv_alpha;
        }
    }

    // Pressure rows: the dual-cell divergence equation, negated so the
    // velocity coupling matches the momentum rows and A stays symmetric.
    for (std::size_t s = 0; s < sys.pressure_ids.size(); ++s) {
        const int v = sys.pressure_ids[s];
        const int prow = sys.pressure_row(static_cast<int>(s));
        const double area = dual.areas[static_cast<std::size_t>(v)];
        const int ri = record_of[static_cast<std::size_t>(v)];
        const EliminationRecord* rec = ri >= 0 ? &sys.records[static_cast<std::size_t>(ri)] : nullptr;

        // Divergence moments of the cell basis over this dual cell.
        std::map<int, Vec2> div_moment;
        for (int t : meshes.tri.by_dual[static_cast<std::size_t>(v)]) {
            const SubTri& st = tris[static_cast<std::size_t>(t)];
            const SubTriOps& op = ops.tri_ops[static_cast<std::size_t>(t)];
            auto add_half = [&](const HalfGradient& g) {
                div_moment[st.k] += g.g_k * g.area;
                if (st.interior()) div_moment[st.l] += g.g_l * g.area;
            };
            add_half(op.half_k);
            if (st.interior()) add_half(*op.half_l);
        }

        double diag = -(lambda_pen * sys.h * area);
        if (rec != nullptr) {
            const double inv_alpha = 1.0 / rec->alpha;
            diag += -norm2(rec->d) * inv_alpha;
            sys.F[prow] = (rec->d.x * rec->f_moment.x + rec->d.y * rec->f_moment.y) * inv_alpha;
            auto coeff_of = [&](int cell) {
                auto it = std::lower_bound(rec->cell_coeffs.begin(), rec->cell_coeffs.end(), cell,
                                           [](const auto& a, int b) { return a.first < b; });
                return it != rec->cell_coeffs.end() && it->first == cell ? it->second : 0.0;
            };
            for (const auto& [j, e] : div_moment) {
                const double cj = coeff_of(j);
                const Vec2 val{-e.x + cj * rec->d.x * inv_alpha, -e.y + cj * rec->d.y * inv_alpha};
                trip.emplace_back(2 * j, prow, val.x);
                trip.emplace_back(prow, 2 * j, val.x);
                trip.emplace_back(2 * j + 1, prow, val.y);
                trip.emplace_back(prow, 2 * j + 1, val.y);
            }
        } else {
            for (const auto& [j, e] : div_moment) {
                trip.emplace_back(2 * j, prow, -e.x);
                trip.emplace_back(prow, 2 * j, -e.x);
                trip.emplace_back(2 * j + 1, prow, -e.y);
                trip.emplace_back(prow, 2 * j + 1, -e.y);
            }
        }
        trip.emplace_back(prow, prow, diag);
    }

    sys.A.resize(n_rows, n_rows);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

DiscreteVelocity recover_vertex_velocities(const MeshSet& meshes, const GlobalSystem& system,
                                           const Eigen::VectorXd& x) {
    DiscreteVelocity u;
    u.cell.resize(static_cast<std::size_t>(system.n_cells));
    for (int k = 0; k < system.n_cells; ++k) {
        u.cell[static_cast<std::size_t>(k)] = Vec2{x[2 * k], x[2 * k + 1]};
    }
    u.vertex.assign(static_cast<std::size_t>(meshes.primal.n_vertices()), Vec2{});
    for (const EliminationRecord& rec : system.records) {
        Vec2 acc = rec.f_moment;
        for (const auto& [j, cj] : rec.cell_coeffs) {
            acc -= u.cell[static_cast<std::size_t>(j)] * cj;
        }
        const int slot = system.pressure_slot[static_cast<std::size_t>(rec.vertex)];
        if (slot >= 0) {
            const double p = x[system.pressure_row(slot)];
            acc += rec.d * p;
        }
        u.vertex[static_cast<std::size_t>(rec.vertex)] = acc * (1.0 / rec.alpha);
    }
    return u;
}

DiscretePressure extract_pressure(const MeshSet& meshes, const GlobalSystem& system,
                                  const Eigen::VectorXd& x) {
    DiscretePressure p;
    p.dual.assign(static_cast<std::size_t>(meshes.primal.n_vertices()), 0.0);
    for (std::size_t s = 0; s < system.pressure_ids.size(); ++s) {
        p.dual[static_cast<std::size_t>(system.pressure_ids[s])] =
            x[system.pressure_row(static_cast<int>(s))];
    }
    return p;
}

void write_matrix(const Eigen::SparseMatrix<double>& A, const std::string& path) {
    struct Entry {
        int row, col;
        double value;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(A.nonZeros()));
    for (int outer = 0; outer < A.outerSize(); ++outer) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, outer); it; ++it) {
            entries.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (out == nullptr) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    for (const Entry& e : entries) {
        std::fprintf(out, "%d %d %.17g\n", e.row, e.col, e.value);
    }
    std::fclose(out);
}

}  // namespace pfecc
