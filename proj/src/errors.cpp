#include "pfecc/errors.hpp"

namespace pfecc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonSimplePolygon: return "NonSimplePolygon";
        case ErrorKind::ZeroAreaCell: return "ZeroAreaCell";
        case ErrorKind::DanglingEdge: return "DanglingEdge";
        case ErrorKind::CellCenterOutside: return "CellCenterOutside";
        case ErrorKind::NoIntersection: return "NoIntersection";
        case ErrorKind::DegenerateSubTriangle: return "DegenerateSubTriangle";
        case ErrorKind::UnsupportedCellType: return "UnsupportedCellType";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::NonPositiveViscosity: return "NonPositiveViscosity";
        case ErrorKind::HypothesisViolation: return "HypothesisViolation";
        case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
        case ErrorKind::SingularLocalSystem: return "SingularLocalSystem";
        case ErrorKind::EmptySystem: return "EmptySystem";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorKind::MeshTooLarge: return "MeshTooLarge";
        case ErrorKind::UsageError: return "UsageError";
    }
    return "UnknownError";
}

}  // namespace pfecc
