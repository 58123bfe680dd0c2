#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backflow/conventions.hpp"
#include "backflow/flux_forms.hpp"
#include "backflow/potential.hpp"

namespace backflow {

struct EvolutionConfig {
    PositionGrid grid{-32.0, 32.0, 1024};
    double dt = 1e-4;
    double t_max = 1.0;
    std::optional<Potential> potential;
    double mass = 1.0;
    /// Snapshots are taken at t = 0 and every `sample_every` steps.
    std::size_t sample_every = 10;
    /// Largest |psi| tolerated at the first and last grid point.
    double leak_tolerance = 1e-6;
    /// Require |x_min|, x_max >= |<x>| + (|<p>| + 5 sigma_p) t_max / m + 10 sigma_x.
    bool enforce_box_rule = true;

    /// dt (pi/dx)^2 / (2m) < 0.5, no delta potential, positive sampling.
    /// Throws InvalidArgument / PreconditionViolation.
    void validate() const;
    std::size_t steps() const;
};

/// Moments of a position-space state; the momentum ones via FFT.
struct PacketMoments {
    double norm = 0.0;
    double mean_x = 0.0;
    double sigma_x = 0.0;
    double mean_p = 0.0;
    double sigma_p = 0.0;
};
PacketMoments packet_moments(std::span<const cdouble> psi, const PositionGrid& grid);

/// Throws PreconditionViolation when the box is too small for the packet.
void check_box(std::span<const cdouble> psi0, const EvolutionConfig& cfg);

/// Normalized (on the grid) exp(-(x-x0)^2/(4 sigma^2) + i p0 x).
std::vector<cdouble> gaussian_packet(const PositionGrid& grid, double x0, double p0, double sigma);

/// |DFT|^2 dk, normalized to the state's norm; index order as in the FFT.
std::vector<double> momentum_marginal(std::span<const cdouble> psi, const PositionGrid& grid);

/// psi' by spectral differentiation on the periodic grid.
std::vector<cdouble> spectral_derivative(std::span<const cdouble> psi, const PositionGrid& grid);

using SnapshotObserver = std::function<void(double t, std::span<const cdouble> psi)>;

/// Strang splitting e^{-iV dt/2} e^{-iK dt} e^{-iV dt/2} with the kinetic
/// factor applied in Fourier space. The observer sees every sampled state.
/// Throws BoundaryLeak once |psi| at either grid edge exceeds the tolerance.
void split_step_evolve(std::span<const cdouble> psi0, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer);

struct Snapshot {
    double t = 0.0;
    std::vector<cdouble> psi;
};

struct Trajectory {
    PositionGrid grid;
    double mass = 1.0;
    std::vector<Snapshot> samples;
};

/// Convenience form that keeps every sample in memory.
Trajectory split_step_evolve(std::span<const cdouble> psi0, const EvolutionConfig& cfg);

struct DiagnosticsSeries {
    std::vector<double> times;
    std::vector<double> p_right;
    std::vector<double> j0;
    /// |dP_right/dt - j0|, centered differences; NaN at both ends.
    std::vector<double> residual;
    /// Smeared flux <J_f>(t); NaN when no smearing was given.
    std::vector<double> jf;
    /// \int F |psi|^2 with F the cumulative of f; NaN without smearing.
    std::vector<double> p_f;

    double max_residual() const;
    /// max |dP_f/dt - J_f| over interior samples (NaN without smearing).
    double max_smeared_residual() const;
};

/// Streaming form of `diagnostics`: feed it samples, then call finish().
class DiagnosticsRecorder {
public:
    DiagnosticsRecorder(const PositionGrid& grid, double mass,
                        std::optional<SmearingFunction> f = std::nullopt);
    ~DiagnosticsRecorder();
    DiagnosticsRecorder(const DiagnosticsRecorder&) = delete;
    DiagnosticsRecorder& operator=(const DiagnosticsRecorder&) = delete;

    void record(double t, std::span<const cdouble> psi);
    SnapshotObserver observer();
    DiagnosticsSeries finish() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// P_right gives the x = 0 cell half weight, so x = 0 must be a grid point
/// (PreconditionViolation otherwise). Samples must be uniform in time.
DiagnosticsSeries diagnostics(const Trajectory& trajectory,
                              const std::optional<SmearingFunction>& f = std::nullopt);

/// Header `t,P_right,j0,residual,Jf`.
std::string diagnostics_csv(const DiagnosticsSeries& d);
/// Header `x,re,im`.
std::string snapshot_csv(const PositionGrid& grid, std::span<const cdouble> psi);

/// <J_f> of a positive-momentum state, evaluated in position space on a local
/// window around the smearing. Throws PreconditionViolation for negative support.
double smeared_flux_position(const MomentumWavefunction& phi, const SmearingFunction& f,
                             double mass = 1.0);

struct BackflowReport {
    /// Rayleigh quotient <phi, A phi> / <phi, phi> on the momentum grid.
    double lambda = 0.0;
    /// <J_f>(0) from the position-space quadrature.
    double jf0_position = 0.0;
    double relative_mismatch = 0.0;
    bool sign_agreement = false;
    bool backflow = false;

    /// Whether the time-domain part ran (only for eigenvectors with lambda < 0).
    bool evolved = false;
    /// Norm of the interpolated initial state before renormalization.
    double initial_norm = 0.0;
    DiagnosticsSeries series;
    /// Fraction of interior samples with J_f < 0 at which P_right decreases.
    double p_right_agreement = 0.0;
    /// Same with the smeared P_f, whose derivative is J_f.
    double p_f_agreement = 0.0;
    std::size_t negative_flux_samples = 0;
};

/// Time-domain witness for the free flux form `a` and a state v on its grid.
/// The state is carried onto the evolution grid by Nystrom interpolation of
/// the eigenvalue equation, then evolved freely on cfg.
BackflowReport backflow_demonstration(const MomentumWavefunction& v, const FluxFormMatrix& a,
                                      EvolutionConfig cfg);

}  // namespace backflow
