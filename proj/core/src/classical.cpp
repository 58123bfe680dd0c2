#include "backflow/classical.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"

namespace backflow {

ClassicalEnsemble::ClassicalEnsemble(std::vector<double> x, std::vector<double> p, double mass)
    : x_(std::move(x)), p_(std::move(p)), mass_(Conventions(mass).mass()) {
    if (x_.size() != p_.size()) throw InvalidArgument("positions and momenta differ in length");
}

ClassicalEnsemble ClassicalEnsemble::sample(std::size_t n, const SamplingLaw& position,
                                            const SamplingLaw& momentum, std::uint64_t seed,
                                            double mass) {
    Rng rng(seed);
    std::vector<double> x(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = position(rng);
        p[i] = momentum(rng);
        if (!(p[i] > 0.0)) {
            throw PreconditionViolation("momentum law produced p = " + format_double(p[i]));
        }
    }
    return ClassicalEnsemble(std::move(x), std::move(p), mass);
}

double ClassicalEnsemble::p_right(double t) const {
    if (x_.empty()) return 0.0;
    std::size_t right = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (position(i, t) > 0.0) ++right;
    }
    return static_cast<double>(right) / static_cast<double>(x_.size());
}

SamplingLaw gaussian_law(double mean, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian law needs sigma > 0");
    return [mean, sigma](Rng& rng) { return std::normal_distribution<double>(mean, sigma)(rng); };
}

SamplingLaw uniform_law(double lo, double hi) {
    if (!(hi > lo)) throw InvalidArgument("uniform law needs lo < hi");
    return [lo, hi](Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
}

SamplingLaw momentum_law(const MomentumWavefunction& phi) {
    if (phi.support() != MomentumSupport::Positive) {
        throw PreconditionViolation("momentum law needs a positive-momentum state");
    }
    const auto& g = phi.grid();
    const auto nodes = g.nodes();
    const auto w = g.weights();
    const auto amp = phi.amplitudes();
    std::vector<double> prob(nodes.size()), edges(nodes.size() + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) prob[i] = w[i] * std::norm(amp[i]);
    edges.front() = 0.0;
    edges.back() = g.p_max();
    for (std::size_t i = 1; i < nodes.size(); ++i) edges[i] = 0.5 * (nodes[i - 1] + nodes[i]);
    auto pick = std::make_shared<std::discrete_distribution<std::size_t>>(prob.begin(), prob.end());
    return [pick, edges](Rng& rng) {
        const std::size_t i = (*pick)(rng);
        double p = std::uniform_real_distribution<double>(edges[i], edges[i + 1])(rng);
        if (!(p > 0.0)) p = 0.5 * edges[i + 1];
        return p;
    };
}

ClassicalReport classical_flux_baseline(std::size_t n_particles, const SamplingLaw& position,
                                        const SamplingLaw& momentum, std::span<const double> times,
                                        std::uint64_t seed, double mass) {
    if (n_particles < 10000) {
        throw PreconditionViolation("classical baseline needs at least 10^4 particles");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw InvalidArgument("classical baseline times must be ascending");
    }
    const auto ens = ClassicalEnsemble::sample(n_particles, position, momentum, seed, mass);
    ClassicalReport r;
    r.n_particles = n_particles;
    r.times.assign(times.begin(), times.end());
    for (double t : times) r.p_right.push_back(ens.p_right(t));
    for (std::size_t i = 1; i < r.p_right.size(); ++i) {
        if (r.p_right[i] < r.p_right[i - 1]) ++r.violations;
    }
    return r;
}

}  // namespace backflow
