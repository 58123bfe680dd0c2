#pragma once

#include <memory>
#include <span>
#include <string>

#include "backflow/conventions.hpp"
#include "backflow/matrix.hpp"

namespace backflow {

enum class FormKind { FreeFlux, FreeDensity, DressedFlux };

const char* to_string(FormKind kind) noexcept;

/// Hermitian discretization A_ij = sqrt(w_i w_j) K(p_i, p_j) of a quadratic
/// form restricted to positive momenta. For amplitudes phi on the grid,
/// v^H A v with v_i = sqrt(w_i) phi_i is the quadrature value of the form.
class FluxFormMatrix {
public:
    FluxFormMatrix(std::shared_ptr<const MomentumGrid> grid, FormKind kind, ComplexMatrix entries,
                   SmearingFunction smearing, double mass, std::string potential_spec = {});

    const MomentumGrid& grid() const noexcept { return *grid_; }
    std::shared_ptr<const MomentumGrid> grid_ptr() const noexcept { return grid_; }
    FormKind kind() const noexcept { return kind_; }
    const ComplexMatrix& entries() const noexcept { return entries_; }
    const SmearingFunction& smearing() const noexcept { return smearing_; }
    double mass() const noexcept { return mass_; }
    /// Potential spec string for dressed forms, empty otherwise.
    const std::string& potential_spec() const noexcept { return potential_spec_; }

    std::size_t size() const noexcept { return entries_.rows(); }

    /// <phi, A phi> for a wavefunction on the same grid (real part; the
    /// imaginary part vanishes up to rounding for Hermitian A).
    double expectation(const MomentumWavefunction& phi) const;

private:
    std::shared_ptr<const MomentumGrid> grid_;
    FormKind kind_;
    ComplexMatrix entries_;
    SmearingFunction smearing_;
    double mass_;
    std::string potential_spec_;
};

/// K(p, q) = (p + q) / (4 pi m) f^(p - q)
cdouble free_flux_kernel(double p, double q, const SmearingFunction& f, double mass = 1.0);

/// K(p, q) = f^(p - q) / (2 pi)
cdouble density_kernel(double p, double q, const SmearingFunction& f);

FluxFormMatrix build_flux_matrix(std::shared_ptr<const MomentumGrid> grid,
                                 const SmearingFunction& f, double mass = 1.0);
FluxFormMatrix build_flux_matrix(const MomentumGrid& grid, const SmearingFunction& f,
                                 double mass = 1.0);

FluxFormMatrix build_density_matrix(std::shared_ptr<const MomentumGrid> grid,
                                    const SmearingFunction& f);
FluxFormMatrix build_density_matrix(const MomentumGrid& grid, const SmearingFunction& f);

/// \int f(x) j(x) dx with j = Im(conj(psi) psi') / m, psi' by central
/// differences and the integral by the trapezoid rule on the interior points.
///
/// Throws BoundaryLeak when f(x_b) / sup f * |psi(x_b)| > 1e-6 at either end
/// of the grid, i.e. when the part of the state the smeared integral can see
/// is cut off by the box.
double flux_expectation_position(std::span<const cdouble> psi, const PositionGrid& grid,
                                 const SmearingFunction& f, double mass = 1.0);

/// Upper-triangle dump, header `i,j,re,im`.
std::string matrix_csv(const FluxFormMatrix& a);
/// JSON sidecar with grid, smearing, mass and kind.
std::string matrix_metadata_json(const FluxFormMatrix& a);

}  // namespace backflow
