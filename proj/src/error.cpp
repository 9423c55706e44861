#include "flatlab/error.hpp"

namespace flatlab {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::MissingFace: return "MissingFace";
    case ErrorKind::MissingExponent: return "MissingExponent";
    case ErrorKind::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorKind::CocycleViolation: return "CocycleViolation";
    case ErrorKind::InvalidCharacter: return "InvalidCharacter";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::TruncationFailure: return "TruncationFailure";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DegenerateLattice: return "DegenerateLattice";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::NearZeroSample: return "NearZeroSample";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorKind::DivisorTooClose: return "DivisorTooClose";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::InvalidCutoff: return "InvalidCutoff";
    case ErrorKind::SingularWeight: return "SingularWeight";
    case ErrorKind::NotSubharmonic: return "NotSubharmonic";
    case ErrorKind::SolverDivergence: return "SolverDivergence";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::OutOfAdmissibleRegion: return "OutOfAdmissibleRegion";
    }
    return "Error";
}

}  // namespace flatlab
