#pragma once

/** @file errors.hpp
 *  @brief Error taxonomy shared by all solver modules.
 */

#include <stdexcept>
#include <string>

namespace pfecc {

enum class ErrorKind {
    // mesh construction / IO
    NonSimplePolygon,
    ZeroAreaCell,
    DanglingEdge,
    CellCenterOutside,
    NoIntersection,
    DegenerateSubTriangle,
    UnsupportedCellType,  // reserved; uniform refinement handles all polygon sizes
    ParseError,
    IoError,
    // operators
    NonPositiveViscosity,
    HypothesisViolation,
    PointOutsideDomain,
    // assembly
    SingularLocalSystem,
    EmptySystem,
    // linear solve / diagnostics
    SingularMatrix,
    NumericalBreakdown,
    MeshTooLarge,
    // configuration
    UsageError,
};

const char* to_string(ErrorKind kind);

/// Single exception type carrying a machine-checkable kind plus a message
/// naming the offending entity.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace pfecc
