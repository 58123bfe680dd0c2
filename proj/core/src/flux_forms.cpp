#include "backflow/flux_forms.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"
#include "backflow/parallel.hpp"

namespace backflow {

const char* to_string(FormKind kind) noexcept {
    switch (kind) {
        case FormKind::FreeFlux: return "free-flux";
        case FormKind::FreeDensity: return "free-density";
        case FormKind::DressedFlux: return "dressed-flux";
    }
    return "unknown";
}

FluxFormMatrix::FluxFormMatrix(std::shared_ptr<const MomentumGrid> grid, FormKind kind,
                               ComplexMatrix entries, SmearingFunction smearing, double mass,
                               std::string potential_spec)
    : grid_(std::move(grid)),
      kind_(kind),
      entries_(std::move(entries)),
      smearing_(std::move(smearing)),
      mass_(Conventions(mass).mass()),
      potential_spec_(std::move(potential_spec)) {
    if (!grid_ || entries_.rows() != grid_->size() || !entries_.square()) {
        throw InvalidArgument("flux form matrix must be square with one row per grid node");
    }
}

double FluxFormMatrix::expectation(const MomentumWavefunction& phi) const {
    if (phi.grid().size() != size()) throw InvalidArgument("wavefunction grid size mismatch");
    if (phi.support() != MomentumSupport::Positive) {
        throw PreconditionViolation("flux form is defined on positive-momentum states only");
    }
    return entries_.quadratic_form(phi.scaled_amplitudes()).real();
}

cdouble free_flux_kernel(double p, double q, const SmearingFunction& f, double mass) {
    return (p + q) / (4.0 * kPi * mass) * f.fourier(p - q);
}

cdouble density_kernel(double p, double q, const SmearingFunction& f) {
    return f.fourier(p - q) / (2.0 * kPi);
}

namespace {

template <typename Kernel>
ComplexMatrix assemble(const MomentumGrid& grid, Kernel kernel) {
    const std::size_t n = grid.size();
    const auto p = grid.nodes();
    const auto sw = grid.sqrt_weights();
    ComplexMatrix a(n, n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j) a(i, j) = sw[i] * sw[j] * kernel(p[i], p[j]);
        a(i, i) = a(i, i).real();
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = std::conj(a(i, j));
    }
    return a;
}

}  // namespace

FluxFormMatrix build_flux_matrix(std::shared_ptr<const MomentumGrid> grid,
                                 const SmearingFunction& f, double mass) {
    Conventions conv(mass);
    auto entries =
        assemble(*grid, [&](double p, double q) { return free_flux_kernel(p, q, f, conv.mass()); });
    return FluxFormMatrix(std::move(grid), FormKind::FreeFlux, std::move(entries), f, mass);
}

FluxFormMatrix build_flux_matrix(const MomentumGrid& grid, const SmearingFunction& f,
                                 double mass) {
    return build_flux_matrix(std::make_shared<const MomentumGrid>(grid), f, mass);
}

FluxFormMatrix build_density_matrix(std::shared_ptr<const MomentumGrid> grid,
                                    const SmearingFunction& f) {
    auto entries = assemble(*grid, [&](double p, double q) { return density_kernel(p, q, f); });
    return FluxFormMatrix(std::move(grid), FormKind::FreeDensity, std::move(entries), f, 1.0);
}

FluxFormMatrix build_density_matrix(const MomentumGrid& grid, const SmearingFunction& f) {
    return build_density_matrix(std::make_shared<const MomentumGrid>(grid), f);
}

double flux_expectation_position(std::span<const cdouble> psi, const PositionGrid& grid,
                                 const SmearingFunction& f, double mass) {
    Conventions conv(mass);
    const std::size_t n = grid.size();
    if (psi.size() != n) throw InvalidArgument("wavefunction does not match the position grid");

    const double peak = f.peak_bound();
    const double leak_lo = f(grid.x(0)) / peak * std::abs(psi[0]);
    const double leak_hi = f(grid.x(n - 1)) / peak * std::abs(psi[n - 1]);
    if (std::max(leak_lo, leak_hi) > 1e-6) {
        throw BoundaryLeak("flux_expectation_position: smeared amplitude at the box edge is " +
                           format_double(std::max(leak_lo, leak_hi)));
    }

    const double dx = grid.dx();
    double acc = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const cdouble dpsi = (psi[j + 1] - psi[j - 1]) / (2.0 * dx);
        const double current = std::imag(std::conj(psi[j]) * dpsi) / conv.mass();
        acc += f(grid.x(j)) * current;
    }
    return acc * dx;
}

std::string matrix_csv(const FluxFormMatrix& a) {
    std::string out = "i,j,re,im\n";
    const auto& m = a.entries();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += format_double(m(i, j).real());
            out += ',';
            out += format_double(m(i, j).imag());
            out += '\n';
        }
    }
    return out;
}

std::string matrix_metadata_json(const FluxFormMatrix& a) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(a.kind());
    j["grid"] = {{"p_max", a.grid().p_max()}, {"n_nodes", a.grid().size()}};
    j["smearing"] = a.smearing().to_spec();
    j["mass"] = a.mass();
    if (!a.potential_spec().empty()) j["potential"] = a.potential_spec();
    return j.dump(2) + "\n";
}

}  // namespace backflow
