#pragma once

#include <vector>

#include "backflow/matrix.hpp"

namespace backflow {

/// Eigenvalues in ascending order; column j of `vectors` belongs to values[j].
struct HermitianEigensystem {
    std::vector<double> values;
    ComplexMatrix vectors;
};

/// Householder reduction to tridiagonal form, a diagonal phase transform to a
/// real symmetric tridiagonal, then implicit-shift QL.
///
/// Throws NotHermitian if max |A_ji - conj(A_ij)| > 1e-10 ||A||_F and
/// NoConvergence if QL needs more than 30 n iterations in total.
HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& a);

struct Eigenpair {
    double value = 0.0;
    std::vector<cdouble> vector;
    /// ||A v - value v||
    double residual = 0.0;
};

/// Smallest eigenvalue and a unit eigenvector. The phase is fixed so the
/// first component above 1e-12 max|v_i| is real and positive; within a
/// degenerate eigenspace the basis vector with lexicographically largest real
/// parts wins. Throws NoConvergence if the residual exceeds 1e-9 ||A||_F.
Eigenpair lowest_eigenpair(const ComplexMatrix& a);

/// Multiply v by the unit phase that makes its first significant component
/// real and positive.
void fix_phase(std::vector<cdouble>& v);

}  // namespace backflow
