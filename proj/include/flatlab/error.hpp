#pragma once

#include <stdexcept>
#include <string>

namespace flatlab {

enum class ErrorKind {
    Parse,
    Schema,
    MissingFace,
    MissingExponent,
    AntisymmetryViolation,
    CocycleViolation,
    InvalidCharacter,
    DimensionMismatch,
    NonFiniteEntry,
    BudgetExceeded,
    DivisionByZero,
    TruncationFailure,
    NotSymmetric,
    NotPositiveDefinite,
    DegenerateLattice,
    DegenerateFit,
    NearZeroSample,
    BadIndex,
    NoOverlap,
    OutOfChart,
    StencilOutOfDomain,
    DivisorTooClose,
    OutOfDomain,
    InvalidCutoff,
    SingularWeight,
    NotSubharmonic,
    SolverDivergence,
    QuadratureFailure,
    OutOfAdmissibleRegion,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace flatlab
