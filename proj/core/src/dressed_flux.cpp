#include "backflow/dressed_flux.hpp"

#include <algorithm>
#include <cmath>

#include "backflow/errors.hpp"
#include "backflow/parallel.hpp"
#include "backflow/quadrature.hpp"

namespace backflow {

FluxFormMatrix build_dressed_flux_matrix(std::shared_ptr<const MomentumGrid> grid,
                                         const SmearingFunction& f, const Potential& v,
                                         double mass, ScatteringMethod method) {
    Conventions conv(mass);
    admissibility(v);

    const std::size_t n = grid->size();
    const auto k = grid->nodes();
    const auto sw = grid->sqrt_weights();

    // Panels resolve both the Gaussian and the fastest local oscillation.
    const double vmax = v.is_delta() ? 0.0 : v.max_abs();
    const double kmax_local = std::sqrt(grid->p_max() * grid->p_max() + 2.0 * conv.mass() * vmax);
    double min_width = f.terms().front().width;
    for (const auto& t : f.terms()) min_width = std::min(min_width, t.width);
    const double omega = 2.0 * kmax_local + 1.0 / min_width;
    const double panel = std::min(0.5 * min_width, 6.0 / omega);
    const double l = v.support_radius();
    std::vector<double> cuts{-l, l};
    for (double b : v.breakpoints()) cuts.push_back(b);
    const auto rule =
        composite_gauss_legendre(f.window_lo(), f.window_hi(), panel, 16, cuts);
    const std::size_t nq = rule.nodes.size();

    std::vector<double> fw(nq);
    for (std::size_t q = 0; q < nq; ++q) fw[q] = f(rule.nodes[q]) * rule.weights[q];

    // psi[j * nq + q] = psi_{k_j}(x_q), likewise for psi'.
    std::vector<cdouble> psi(n * nq), dpsi(n * nq);
    parallel_for(n, [&](std::size_t j) {
        const auto s = solve_scattering(v, k[j], conv.mass(), method);
        for (std::size_t q = 0; q < nq; ++q) {
            const auto [val, der] = s.eval(rule.nodes[q]);
            psi[j * nq + q] = val;
            dpsi[j * nq + q] = der;
        }
    });

    // X_ij = \int f conj(psi_i) psi'_j ; M = (X - X^H) / (4 pi i m)
    ComplexMatrix x(n, n);
    parallel_for(n, [&](std::size_t i) {
        const cdouble* pi = psi.data() + i * nq;
        for (std::size_t j = 0; j < n; ++j) {
            const cdouble* dj = dpsi.data() + j * nq;
            cdouble acc = 0.0;
            for (std::size_t q = 0; q < nq; ++q) acc += fw[q] * std::conj(pi[q]) * dj[q];
            x(i, j) = acc;
        }
    });

    const cdouble denom(0.0, 4.0 * kPi * conv.mass());
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const cdouble m = (x(i, j) - std::conj(x(j, i))) / denom;
            a(i, j) = sw[i] * sw[j] * m;
        }
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = std::conj(a(i, j));
    }
    return FluxFormMatrix(std::move(grid), FormKind::DressedFlux, std::move(a), f, conv.mass(),
                          v.to_spec());
}

FluxFormMatrix build_dressed_flux_matrix(const MomentumGrid& grid, const SmearingFunction& f,
                                         const Potential& v, double mass,
                                         ScatteringMethod method) {
    return build_dressed_flux_matrix(std::make_shared<const MomentumGrid>(grid), f, v, mass,
                                     method);
}

}  // namespace backflow
