#pragma once

#include <memory>

#include "backflow/conventions.hpp"
#include "backflow/flux_forms.hpp"
#include "backflow/potential.hpp"
#include "backflow/scattering.hpp"

namespace backflow {

/// A_ij = sqrt(w_i w_j) M(k_i, k_j) with
///   M(k, k') = (1/2pi) \int f [conj(psi_k) psi'_k' - conj(psi'_k) psi_k'] / (2im) dx
/// over the left-incidence scattering states of V. Bound states do not enter.
/// Throws InadmissiblePotential and propagates scattering errors.
FluxFormMatrix build_dressed_flux_matrix(std::shared_ptr<const MomentumGrid> grid,
                                         const SmearingFunction& f, const Potential& v,
                                         double mass = 1.0,
                                         ScatteringMethod method = ScatteringMethod::Auto);
FluxFormMatrix build_dressed_flux_matrix(const MomentumGrid& grid, const SmearingFunction& f,
                                         const Potential& v, double mass = 1.0,
                                         ScatteringMethod method = ScatteringMethod::Auto);

}  // namespace backflow
