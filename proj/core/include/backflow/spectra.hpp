#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "backflow/conventions.hpp"
#include "backflow/flux_forms.hpp"

namespace backflow {

struct SpectrumResult {
    /// Estimate of minus the backflow constant.
    double lambda_min = 0.0;
    /// Unit-norm minimizer, phi_i = v_i / sqrt(w_i).
    MomentumWavefunction eigenvector;
    /// ||A v - lambda_min v||
    double residual = 0.0;
    double p_max = 0.0;
    std::size_t n_nodes = 0;
};

SpectrumResult lowest_eigenpair(const FluxFormMatrix& a);

/// JSON with lambda_min, residual, grid and the form's metadata.
std::string spectrum_json(const SpectrumResult& s, const FluxFormMatrix& a);

struct ConvergenceRung {
    std::size_t n = 0;
    double p_max = 0.0;
    double lambda_min = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRung> ladder;
    bool converged = false;
    /// |last - previous| / |last|; +inf for a single rung.
    double final_rel_change = 0.0;

    /// |lambda(r+1) - lambda(r)| along the ladder.
    std::vector<double> successive_differences() const;
};

using MatrixBuilder = std::function<FluxFormMatrix(std::shared_ptr<const MomentumGrid>)>;
using RungLogger = std::function<void(const ConvergenceRung&)>;

/// Rungs run over p_max_list (outer) x n_list (inner), so consecutive rungs
/// refine n at fixed p_max and the last pair compares the two finest n at the
/// largest p_max. Both lists must be ascending and nonempty, tol > 0.
ConvergenceReport convergence_scan(const MatrixBuilder& builder,
                                   std::span<const std::size_t> n_list,
                                   std::span<const double> p_max_list, double tol,
                                   const RungLogger& log = {});

/// Rebuilds the converged flag from a ladder and tolerance.
ConvergenceReport make_convergence_report(std::vector<ConvergenceRung> ladder, double tol);

/// `{"ladder":[...],"converged":..,"final_rel_change":..}`; +inf is written as null.
std::string convergence_json(const ConvergenceReport& r);

}  // namespace backflow
