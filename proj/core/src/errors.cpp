#include "backflow/errors.hpp"

namespace backflow {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::PreconditionViolation: return "precondition-violation";
        case ErrorKind::ResolutionError: return "resolution-error";
        case ErrorKind::BoundaryLeak: return "boundary-leak";
        case ErrorKind::NotHermitian: return "not-hermitian";
        case ErrorKind::NoConvergence: return "no-convergence";
        case ErrorKind::InadmissiblePotential: return "inadmissible-potential";
        case ErrorKind::NonpositiveWavenumber: return "nonpositive-wavenumber";
        case ErrorKind::StepResolution: return "step-resolution";
    }
    return "unknown";
}

}  // namespace backflow
