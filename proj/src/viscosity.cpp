#include "pfecc/viscosity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "pfecc/errors.hpp"
#include "pfecc/parallel.hpp"

namespace pfecc {

ViscosityField make_constant_viscosity(double v) {
    if (v <= 0.0) fail(ErrorKind::NonPositiveViscosity, "constant viscosity must be positive");
    ViscosityField f;
    f.value = [v](Vec2) { return v; };
    f.lower = v;
    f.upper = v;
    f.lipschitz = 0.0;
    return f;
}

ViscosityField make_smooth_viscosity() {
    constexpr double pi = std::numbers::pi;
    ViscosityField f;
    f.value = [](Vec2 x) { return 1.0 + 0.5 * std::sin(pi * x.x) * std::sin(pi * x.y); };
    f.lower = 0.5;
    f.upper = 1.5;
    f.lipschitz = 0.5 * pi;
    return f;
}

ViscosityField make_jump_viscosity(double v1, double v2) {
    if (v1 <= 0.0 || v2 <= 0.0) fail(ErrorKind::NonPositiveViscosity, "jump viscosity values must be positive");
    ViscosityField f;
    f.value = [v1, v2](Vec2 x) { return x.x < 0.5 ? v1 : v2; };
    f.lower = std::min(v1, v2);
    f.upper = std::max(v1, v2);
    // Discontinuous: no finite Lipschitz constant; report the jump scale.
    f.lipschitz = std::numeric_limits<double>::infinity();
    return f;
}

ViscosityField parse_viscosity(const std::string& id) {
    if (id == "smooth") return make_smooth_viscosity();
    auto parse_tail = [&](std::size_t pos, const char* what) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(id.substr(pos), &used);
        } catch (const std::exception&) {
            fail(ErrorKind::UsageError, std::string("bad ") + what + " in viscosity id '" + id + "'");
        }
        return std::pair<double, std::size_t>(v, pos + used);
    };
    if (id.rfind("const:", 0) == 0) {
        auto [v, end] = parse_tail(6, "value");
        if (end != id.size()) fail(ErrorKind::UsageError, "trailing characters in viscosity id '" + id + "'");
        return make_constant_viscosity(v);
    }
    if (id.rfind("jump:", 0) == 0) {
        auto [v1, mid] = parse_tail(5, "first value");
        if (mid >= id.size() || id[mid] != ':') {
            fail(ErrorKind::UsageError, "viscosity id '" + id + "' needs jump:<v1>:<v2>");
        }
        auto [v2, end] = parse_tail(mid + 1, "second value");
        if (end != id.size()) fail(ErrorKind::UsageError, "trailing characters in viscosity id '" + id + "'");
        return make_jump_viscosity(v1, v2);
    }
    fail(ErrorKind::UsageError, "unknown viscosity id '" + id + "'");
}

double average_viscosity(const ViscosityField& field, const PrimalMesh& mesh, int cell) {
    const auto& ids = mesh.cells[static_cast<std::size_t>(cell)];
    const Vec2 c = mesh.centers[static_cast<std::size_t>(cell)];
    double acc = 0.0;
    double area_acc = 0.0;
    const std::size_t m = ids.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(ids[i])];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(ids[(i + 1) % m])];
        const double area = std::abs(triangle_signed_area(c, a, b));
        double tri_acc = 0.0;
        for (const auto& g : kTriGauss3) {
            const Vec2 x = c * g[0] + a * g[1] + b * g[2];
            const double v = field(x);
            if (!(v > 0.0)) {
                fail(ErrorKind::NonPositiveViscosity,
                     "viscosity sample <= 0 in cell " + std::to_string(cell));
            }
            tri_acc += v / 3.0;
        }
        acc += area * tri_acc;
        area_acc += area;
    }
    return acc / area_acc;
}

std::vector<double> cell_viscosities(const ViscosityField& field, const PrimalMesh& mesh) {
    std::vector<double> mu(static_cast<std::size_t>(mesh.n_cells()), 0.0);
    parallel_for(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t k) {
        mu[k] = average_viscosity(field, mesh, static_cast<int>(k));
    });
    return mu;
}

}  // namespace pfecc
