#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "backflow/conventions.hpp"

namespace backflow {

using Rng = std::mt19937_64;
using SamplingLaw = std::function<double(Rng&)>;

/// Free classical particles, x_i(t) = x_i + p_i t / m.
class ClassicalEnsemble {
public:
    ClassicalEnsemble(std::vector<double> x, std::vector<double> p, double mass = 1.0);

    /// Draws positions then momenta per particle. Every momentum must be
    /// strictly positive (PreconditionViolation otherwise).
    static ClassicalEnsemble sample(std::size_t n, const SamplingLaw& position,
                                    const SamplingLaw& momentum, std::uint64_t seed,
                                    double mass = 1.0);

    std::size_t size() const noexcept { return x_.size(); }
    std::span<const double> positions() const noexcept { return x_; }
    std::span<const double> momenta() const noexcept { return p_; }
    double mass() const noexcept { return mass_; }

    double position(std::size_t i, double t) const { return x_[i] + p_[i] * t / mass_; }
    /// Fraction of particles with x_i(t) > 0.
    double p_right(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> p_;
    double mass_;
};

SamplingLaw gaussian_law(double mean, double sigma);
SamplingLaw uniform_law(double lo, double hi);
/// Node i with probability w_i |phi_i|^2, then uniform within the node's cell
/// (cells split at midpoints, bounded by 0 and p_max).
SamplingLaw momentum_law(const MomentumWavefunction& phi);

struct ClassicalReport {
    std::vector<double> times;
    std::vector<double> p_right;
    /// Number of consecutive time pairs with P_right decreasing.
    std::size_t violations = 0;
    std::size_t n_particles = 0;
};

/// Needs n >= 10^4 and ascending times (PreconditionViolation / InvalidArgument).
ClassicalReport classical_flux_baseline(std::size_t n_particles, const SamplingLaw& position,
                                        const SamplingLaw& momentum, std::span<const double> times,
                                        std::uint64_t seed, double mass = 1.0);

}  // namespace backflow
