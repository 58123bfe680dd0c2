#pragma once

#include <stdexcept>
#include <string>

namespace backflow {

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
    InvalidArgument,
    PreconditionViolation,
    ResolutionError,
    BoundaryLeak,
    NotHermitian,
    NoConvergence,
    InadmissiblePotential,
    NonpositiveWavenumber,
    StepResolution,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

template <ErrorKind K>
class KindedError : public Error {
public:
    explicit KindedError(const std::string& what) : Error(K, what) {}
};

using InvalidArgument = KindedError<ErrorKind::InvalidArgument>;
using PreconditionViolation = KindedError<ErrorKind::PreconditionViolation>;
using ResolutionError = KindedError<ErrorKind::ResolutionError>;
using BoundaryLeak = KindedError<ErrorKind::BoundaryLeak>;
using NotHermitian = KindedError<ErrorKind::NotHermitian>;
using NoConvergence = KindedError<ErrorKind::NoConvergence>;
using InadmissiblePotential = KindedError<ErrorKind::InadmissiblePotential>;
using NonpositiveWavenumber = KindedError<ErrorKind::NonpositiveWavenumber>;
using StepResolutionError = KindedError<ErrorKind::StepResolution>;

}  // namespace backflow
