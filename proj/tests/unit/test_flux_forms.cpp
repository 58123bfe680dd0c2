#include <doctest.h>

#include <cmath>
#include <random>

#include "backflow/backflow.hpp"
#include "oracles/position_quadrature.hpp"

using namespace backflow;

namespace {

const SmearingFunction kUnit = SmearingFunction::gaussian(0.0, 1.0);

std::shared_ptr<const MomentumGrid> grid_ptr(double p_max, std::size_t n) {
    return std::make_shared<const MomentumGrid>(make_gauss_grid(p_max, n));
}

// Smooth positive-momentum packet: a few Gaussians in p with position shifts.
MomentumWavefunction random_packet(std::shared_ptr<const MomentumGrid> g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> centre(1.5, 5.5), width(0.3, 0.8), shift(-2.0, 2.0),
        coef(-1.0, 1.0);
    std::vector<cdouble> amp(g->size(), 0.0);
    for (int term = 0; term < 3; ++term) {
        const double c = centre(rng), s = width(rng), x0 = shift(rng);
        const cdouble a(coef(rng), coef(rng));
        for (std::size_t i = 0; i < amp.size(); ++i) {
            const double p = g->nodes()[i];
            amp[i] += a * std::exp(-(p - c) * (p - c) / (4 * s * s)) * std::polar(1.0, -p * x0);
        }
    }
    return MomentumWavefunction(g, amp).normalized_copy();
}

}  // namespace

TEST_CASE("flux kernel reference values") {
    const double expect = std::sqrt(2 * kPi) / (2 * kPi);
    CHECK(free_flux_kernel(1.0, 1.0, kUnit).real() == doctest::Approx(expect).epsilon(1e-15));
    CHECK(std::abs(free_flux_kernel(1.0, 1.0, kUnit).imag()) < 1e-16);
    CHECK(free_flux_kernel(1.0, 1.0, kUnit).real() == doctest::Approx(0.3989423).epsilon(1e-7));
    CHECK(std::abs(free_flux_kernel(1.0, -1.0, kUnit)) == 0.0);
    CHECK(std::abs(free_flux_kernel(1.0, -1.0, SmearingFunction::gaussian(2.0, 0.3))) == 0.0);
    const auto k1 = free_flux_kernel(2.0, 1.0, kUnit, 1.0);
    const auto k2 = free_flux_kernel(2.0, 1.0, kUnit, 2.0);
    CHECK(std::abs(k2 - 0.5 * k1) < 1e-16);
}

TEST_CASE("flux kernel matches the position-space flux of plane waves") {
    const SmearingFunction shifted({{1.0, 0.7, 0.8}, {0.4, -1.0, 1.3}});
    for (const auto* f : {&kUnit, &shifted}) {
        auto fx = [f](double x) { return (*f)(x); };
        for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {0.5, 3.0}, {4.0, 3.7}}) {
            const auto expect = oracle::plane_wave_flux(p, q, fx, -20.0, 20.0, 1.5);
            CHECK(std::abs(free_flux_kernel(p, q, *f, 1.5) - expect) < 1e-6 * (1.0 + std::abs(expect)));
        }
    }
}

TEST_CASE("kernel symmetry") {
    const SmearingFunction f({{1.0, 0.7, 0.8}});
    for (auto [p, q] : {std::pair{1.0, 2.0}, {0.3, 5.1}}) {
        CHECK(std::abs(free_flux_kernel(q, p, f) - std::conj(free_flux_kernel(p, q, f))) < 1e-15);
        CHECK(std::abs(density_kernel(q, p, f) - std::conj(density_kernel(p, q, f))) < 1e-15);
    }
    CHECK(std::abs(density_kernel(1.0, 1.0, kUnit) - std::sqrt(2 * kPi) / (2 * kPi)) < 1e-15);
}

TEST_CASE("flux matrix entries") {
    const auto g = grid_ptr(8.0, 32);
    const auto a = build_flux_matrix(g, kUnit);
    CHECK(a.kind() == FormKind::FreeFlux);
    CHECK(a.size() == 32);
    CHECK(a.entries().hermitian_defect() <= 1e-13);
    const double fhat0 = kUnit.integral();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = g->nodes()[i], w = g->weights()[i];
        CHECK(a.entries()(i, i).real() == doctest::Approx(w * 2 * p / (4 * kPi) * fhat0).epsilon(1e-14));
        CHECK(a.entries()(i, i).imag() == 0.0);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const auto expect = std::sqrt(w * g->weights()[j]) * free_flux_kernel(p, g->nodes()[j], kUnit);
            CHECK(std::abs(a.entries()(i, j) - expect) <= 1e-15 * (1.0 + std::abs(expect)));
        }
    }
    const auto same = build_flux_matrix(*g, kUnit);
    CHECK(same.entries().data().size() == a.entries().data().size());
    for (std::size_t k = 0; k < a.entries().data().size(); ++k)
        CHECK(same.entries().data()[k] == a.entries().data()[k]);
}

TEST_CASE("density matrix is positive semidefinite") {
    for (double w : {0.3, 1.0, 4.0}) {
        const auto a = build_density_matrix(grid_ptr(8.0, 32), SmearingFunction::gaussian(0.5, w));
        CHECK(a.kind() == FormKind::FreeDensity);
        CHECK(a.entries().hermitian_defect() <= 1e-13);
        const auto es = hermitian_eigensystem(a.entries());
        CHECK(es.values.front() >= -1e-10 * a.entries().frobenius_norm());
    }
    const auto g = grid_ptr(8.0, 16);
    const auto a = build_density_matrix(g, kUnit);
    CHECK(a.entries().quadratic_form(std::vector<cdouble>(16, 0.0)) == cdouble(0.0));
}

TEST_CASE("broad smearing makes the density form diagonal") {
    // Once the width 1/w of f^ is far below the node spacing only the
    // diagonal survives: v^H A v -> f^(0)/(2 pi) sum_i w_i^2 |phi_i|^2. The
    // packet stays away from the grid ends, where Gauss nodes cluster.
    const auto g = grid_ptr(8.0, 32);
    std::vector<cdouble> amp(g->size());
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double p = g->nodes()[i];
        amp[i] = std::exp(-(p - 4.0) * (p - 4.0) / 2.0) * std::polar(1.0, 0.3 * p);
    }
    const MomentumWavefunction phi(g, amp);
    double diag = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) diag += g->weights()[i] * g->weights()[i] * std::norm(amp[i]);
    double err_prev = INFINITY;
    for (double w : {50.0, 100.0}) {
        const auto a = build_density_matrix(g, SmearingFunction::gaussian(0.0, w));
        const double limit = std::sqrt(2 * kPi) * w / (2 * kPi) * diag;
        const double err = std::abs(a.expectation(phi) / limit - 1.0);
        CHECK(err < 1e-6);
        CHECK(err <= err_prev);
        err_prev = err;
    }
}

TEST_CASE("density form agrees with the position integral") {
    const auto g = grid_ptr(8.0, 160);
    std::mt19937_64 rng(11);
    const auto phi = random_packet(g, rng);
    const SmearingFunction f = SmearingFunction::gaussian(0.5, 5.0);
    const auto a = build_density_matrix(g, f);
    const PositionGrid grid(-64.0, 64.0, 4096);
    const auto psi = momentum_to_position(phi, grid);
    double direct = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) direct += f(grid.x(j)) * std::norm(psi[j]) * grid.dx();
    CHECK(a.expectation(phi) == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("position flux of a real wavefunction vanishes") {
    const PositionGrid grid(-16.0, 16.0, 1024);
    std::vector<cdouble> psi(grid.size());
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] = std::exp(-grid.x(j) * grid.x(j) / 3.0) * (1.0 + 0.1 * grid.x(j));
    CHECK(flux_expectation_position(psi, grid, kUnit) == 0.0);
}

TEST_CASE("position flux of a moving packet follows its momentum") {
    const double p0 = 1.5, s = 0.5;
    const PositionGrid grid(-32.0, 32.0, 8192);
    std::vector<cdouble> psi(grid.size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double x = grid.x(j);
        psi[j] = std::pow(2 * kPi * s * s, -0.25) * std::exp(-x * x / (4 * s * s)) * std::polar(1.0, p0 * x);
    }
    const auto broad = SmearingFunction::gaussian(0.0, 20.0);
    double weighted = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) weighted += broad(grid.x(j)) * std::norm(psi[j]) * grid.dx();
    for (double m : {1.0, 2.0}) {
        const double jf = flux_expectation_position(psi, grid, broad, m);
        CHECK(jf > 0.0);
        CHECK(jf == doctest::Approx(p0 / m * weighted).epsilon(1e-4));
    }
}

TEST_CASE("position flux refuses states cut off by the box") {
    const PositionGrid grid(-8.0, 8.0, 256);
    std::vector<cdouble> psi(grid.size(), cdouble(0.1, 0.0));
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= std::polar(1.0, grid.x(j));
    CHECK_THROWS_AS(flux_expectation_position(psi, grid, SmearingFunction::gaussian(0.0, 4.0)), BoundaryLeak);
    // the same tails are invisible to a narrow f far from the edges
    CHECK_NOTHROW(flux_expectation_position(psi, grid, SmearingFunction::gaussian(0.0, 0.5)));
}

TEST_CASE("minimizer is a backflow state in both representations") {
    const auto g = grid_ptr(8.0, 200);
    const auto a = build_flux_matrix(g, kUnit);
    const auto s = lowest_eigenpair(a);
    CHECK(s.lambda_min < 0.0);
    const double q = a.expectation(s.eigenvector);
    CHECK(q == doctest::Approx(s.lambda_min).epsilon(1e-10));
    const PositionGrid grid(-16.0, 16.0, 8192);
    const double pos = flux_expectation_position(momentum_to_position(s.eigenvector, grid), grid, kUnit);
    CHECK(pos < 0.0);
    CHECK(std::abs(pos - q) <= 0.01 * std::abs(q));
}

TEST_CASE("random packets agree in both representations") {
    const auto g = grid_ptr(8.0, 160);
    const auto a = build_flux_matrix(g, kUnit);
    const PositionGrid grid(-16.0, 16.0, 8192);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const auto phi = random_packet(g, rng);
        CHECK(phi.normalized());
        const double q = a.expectation(phi);
        const double pos = flux_expectation_position(momentum_to_position(phi, grid), grid, kUnit);
        CHECK(std::abs(pos - q) <= 0.01 * std::abs(q));
    }
}

TEST_CASE("flux form is indefinite") {
    for (double w : {0.5, 1.0, 2.0}) {
        const auto a = build_flux_matrix(grid_ptr(8.0 / w, 16), SmearingFunction::gaussian(0.0, w));
        const auto es = hermitian_eigensystem(a.entries());
        CHECK(es.values.front() < 0.0);
        CHECK(es.values.back() > 0.0);
    }
}

TEST_CASE("dilating f rescales the spectrum") {
    const double lam0 = lowest_eigenpair(build_flux_matrix(grid_ptr(8.0, 120), kUnit)).lambda_min;
    for (double lam : {0.5, 2.0}) {
        const auto a = build_flux_matrix(grid_ptr(8.0 / lam, 120), kUnit.dilated(lam));
        const double l = lowest_eigenpair(a).lambda_min;
        CHECK(std::abs(l - lam0 / lam) <= 0.005 * std::abs(lam0 / lam));
    }
}

TEST_CASE("expectation requires the matrix grid and positive support") {
    const auto g = grid_ptr(8.0, 16);
    const auto a = build_flux_matrix(g, kUnit);
    const MomentumWavefunction phi(g, std::vector<cdouble>(16, 1.0));
    CHECK_THROWS_AS(a.expectation(phi.time_reversed()), PreconditionViolation);
    const MomentumWavefunction other(grid_ptr(8.0, 12), std::vector<cdouble>(12, 1.0));
    CHECK_THROWS(a.expectation(other));
}

TEST_CASE("matrix dump") {
    const auto a = build_flux_matrix(grid_ptr(4.0, 5), SmearingFunction::gaussian(0.0, 1.0), 2.0);
    const auto csv = matrix_csv(a);
    CHECK(csv.rfind("i,j,re,im\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 1 + 5 * 6 / 2);
    CHECK(csv.find("\n0,4,") != std::string::npos);
    CHECK(csv.find("\n4,0,") == std::string::npos);

    const auto meta = matrix_metadata_json(a);
    CHECK(meta.find("\"kind\"") != std::string::npos);
    CHECK(meta.find("free-flux") != std::string::npos);
    CHECK(meta.find("\"p_max\"") != std::string::npos);
    CHECK(meta.find("\"n_nodes\"") != std::string::npos);
    CHECK(meta.find("gaussian:0,1") != std::string::npos);
    CHECK(meta.find("\"mass\"") != std::string::npos);
    CHECK(std::string(to_string(FormKind::FreeDensity)) == "free-density");
    CHECK(std::string(to_string(FormKind::DressedFlux)) == "dressed-flux");
}
