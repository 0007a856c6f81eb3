#pragma once

/** @file support.hpp
 *  @brief Shared test helpers: hand-built meshes, randomized sub-triangles,
 *         temp directories, and a small process runner for CLI checks.
 */

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pfecc/errors.hpp"
#include "pfecc/geom.hpp"
#include "pfecc/mesh.hpp"
#include "pfecc/operators.hpp"

namespace pfecc::testing {

/// Two 2x2 squares side by side. The sub-triangle owned by the top middle
/// vertex on the shared edge has x_k/x_l = (+-1, 0), x_sigma = (0, 0) and
/// x_vertex = (0, 1): the mirror-symmetric configuration of the
/// transmission-coefficient hand cases.
inline PrimalMesh make_two_square_mesh() {
    std::vector<Vec2> pts = {{-2.0, -1.0}, {0.0, -1.0}, {2.0, -1.0},
                             {2.0, 1.0},   {0.0, 1.0},  {-2.0, 1.0}};
    std::vector<std::vector<int>> cells = {{0, 1, 4, 5}, {1, 2, 3, 4}};
    return build_primal(std::move(pts), std::move(cells));
}

/// Outward normal of segment [a, b] for the triangle with third point c,
/// scaled by the segment length.
inline Vec2 outward_normal(Vec2 a, Vec2 b, Vec2 c) {
    Vec2 n = perp(b - a);
    if (dot(n, c - a) > 0.0) n = -n;
    return n;
}

inline HalfTri make_half(int cell, Vec2 x_vertex, Vec2 x_cell, Vec2 x_sigma) {
    HalfTri h;
    h.cell = cell;
    h.area = std::abs(triangle_signed_area(x_vertex, x_cell, x_sigma));
    h.n_vertex_cell = outward_normal(x_vertex, x_cell, x_sigma);
    h.n_cell_sigma = outward_normal(x_cell, x_sigma, x_vertex);
    h.n_sigma_vertex = outward_normal(x_sigma, x_vertex, x_cell);
    return h;
}

/// Interior sub-triangle assembled from raw coordinates; x_sigma is placed on
/// the segment [x_k, x_l] at parameter s, mirroring the mesh builder's
/// geometry without a full mesh.
inline SubTri make_subtri(Vec2 x_k, Vec2 x_l, Vec2 x_vertex, double s) {
    SubTri st;
    st.edge = 0;
    st.vertex = 0;
    st.k = 0;
    st.l = 1;
    st.x_k = x_k;
    st.x_l = x_l;
    st.x_vertex = x_vertex;
    st.x_sigma = x_k + (x_l - x_k) * s;
    st.sigma_coord = s;
    st.half_k = make_half(0, x_vertex, x_k, st.x_sigma);
    st.half_l = make_half(1, x_vertex, x_l, st.x_sigma);
    return st;
}

/// Random well-shaped interior sub-triangle with the geometry an actual mesh
/// produces: x_vertex is an edge endpoint, x_sigma sits on the edge line, and
/// the two cell centers straddle that line along a transversal direction.
/// Redrawn until both halves keep a minimum angle of 20 degrees.
template <class Rng>
SubTri make_random_subtri(Rng& rng) {
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> reach(0.2, 1.0);
    const double min_angle = 20.0 * M_PI / 180.0;
    for (;;) {
        const Vec2 xv{coord(rng), coord(rng)};
        Vec2 e{coord(rng), coord(rng)};
        if (norm(e) < 0.1) continue;
        e = e / norm(e);
        Vec2 d{coord(rng), coord(rng)};
        if (norm(d) < 0.1) continue;
        d = d / norm(d);
        if (std::abs(cross(e, d)) < 0.1) continue;  // centers must cross the edge line
        const Vec2 xs = xv + e * reach(rng);
        const Vec2 xk = xs - d * reach(rng);
        const Vec2 xl = xs + d * reach(rng);
        if (triangle_min_angle(xv, xk, xs) < min_angle) continue;
        if (triangle_min_angle(xv, xl, xs) < min_angle) continue;
        const double s = norm(xs - xk) / (norm(xs - xk) + norm(xl - xs));
        SubTri st = make_subtri(xk, xl, xv, s);
        st.x_sigma = xs;  // exact crossing point, not the parametric reconstruction
        st.half_k = make_half(0, xv, xk, xs);
        st.half_l = make_half(1, xv, xl, xs);
        return st;
    }
}

/// Sub-triangle plus per-side viscosities drawn together.
struct WeightedSubTri {
    SubTri tri;
    double mu_k = 1.0;
    double mu_l = 1.0;
};

/// Random well-shaped sub-triangle with log-uniform viscosities, redrawn until
/// the flux-matching weights land in the range an accepted mesh produces
/// (beta_k + beta_l in [0, 2]). Outside that range the configuration is close
/// to the flux-matching degeneracy: the weights blow up and the real number
/// 1 - beta_k - beta_l can fall between adjacent doubles, so no bitwise
/// partition of unity is expressible at all.
template <class Rng>
WeightedSubTri make_random_weighted_subtri(Rng& rng, double mu_lo, double mu_hi) {
    std::uniform_real_distribution<double> log_mu(std::log(mu_lo), std::log(mu_hi));
    for (;;) {
        WeightedSubTri w;
        w.tri = make_random_subtri(rng);
        w.mu_k = std::exp(log_mu(rng));
        w.mu_l = std::exp(log_mu(rng));
        try {
            const TransmissionCoefficients b = beta_coefficients(w.tri, w.mu_k, w.mu_l);
            const double s = b.beta_k + b.beta_l;
            if (s < 0.0 || s > 2.0) continue;
        } catch (const Error&) {
            continue;  // drew into the flux-matching degeneracy; resample
        }
        return w;
    }
}

struct RunResult {
    int exit_code = -1;
    std::string output;  ///< stdout and stderr combined
};

/// Runs a shell command, capturing combined output and the exit code.
inline RunResult run_command(const std::string& cmd) {
    RunResult r;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    return r;
}

/// Path of the CLI under test, injected by the build; empty when absent.
inline std::string cli_path() {
    const char* p = std::getenv("PFECC_CLI");
    return p != nullptr ? std::string(p) : std::string();
}

/// Self-deleting temporary directory.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "pfecc-test-XXXXXX").string();
        path = mkdtemp(tmpl.data());
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) return {};
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

}  // namespace pfecc::testing
