#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "backflow/backflow.hpp"
#include "oracles/matching.hpp"
#include "oracles/position_quadrature.hpp"

using namespace backflow;

namespace {

const SmearingFunction kUnit = SmearingFunction::gaussian(0.0, 1.0);

std::vector<Potential> catalog() {
    return {Potential::delta(1.0),          Potential::delta(-1.0),   Potential::square_well(-1.0, 1.0),
            Potential::square_well(1.0, 1.0), Potential::poschl_teller(1), Potential::power_law(1.0, 3.0)};
}

}  // namespace

TEST_CASE("admissibility closed forms") {
    CHECK(admissibility(Potential::delta(2.0)) == 2.0);
    CHECK(admissibility(Potential::delta(-2.0)) == 2.0);
    CHECK(admissibility(Potential::square_well(-1.0, 1.0)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(admissibility(Potential::square_well(0.5, 2.0)) == doctest::Approx(0.5 * (4.0 + 4.0)).epsilon(1e-15));
    CHECK_THROWS_AS(admissibility(Potential::power_law(1.0, 2.0)), InadmissiblePotential);
    CHECK_THROWS_AS(admissibility(Potential::parse("powerlaw:1,1.5")), InadmissiblePotential);
}

TEST_CASE("admissibility agrees with direct quadrature") {
    const auto pt = Potential::poschl_teller(2, 1.5);
    CHECK(admissibility(pt) ==
          doctest::Approx(oracle::weighted_norm([&](double x) { return pt(x); }, 40.0)).epsilon(1e-9));
    const auto pl = Potential::power_law(-0.7, 3.5);
    // the closed form integrates to infinity, the oracle stops at the cutoff;
    // add back 2|s| (1 + r)^{2 - alpha} / (alpha - 2) for the two tails
    const double r = pl.support_radius();
    const double tail = 2 * 0.7 * std::pow(1 + r, 2 - 3.5) / 1.5;
    CHECK(admissibility(pl) ==
          doctest::Approx(oracle::weighted_norm([&](double x) { return pl(x); }, r, 2000000) + tail).epsilon(1e-8));
    CHECK(std::abs(pl(r * 1.01)) == 0.0);
    CHECK(std::abs(pl(0.999 * r)) < 2e-12);
}

TEST_CASE("sampled potentials") {
    std::vector<double> xs, vs;
    for (int i = -40; i <= 40; ++i) {
        xs.push_back(0.25 * i);
        vs.push_back(std::exp(-xs.back() * xs.back()));
    }
    const auto s = Potential::sampled(xs, vs, "gauss");
    CHECK(s(0.125) == doctest::Approx(0.5 * (1.0 + std::exp(-0.0625))));
    CHECK(s(20.0) == 0.0);
    CHECK(sampled_weighted_norm(*s.as<SampledPotential>(), 10.0) ==
          doctest::Approx(oracle::weighted_norm([&](double x) { return s(x); }, 10.0, 400000)).epsilon(1e-8));
    CHECK(admissibility(s) > 0.0);
    CHECK(s.support_radius() <= 10.0);

    // 1/(1 + x^2): (1 + |x|) |V| ~ 1/|x|, logarithmic divergence
    std::vector<double> wx, wv;
    for (int i = -2000; i <= 2000; ++i) {
        wx.push_back(0.5 * i);
        wv.push_back(1.0 / (1.0 + wx.back() * wx.back()));
    }
    CHECK_THROWS_AS(admissibility(Potential::sampled(wx, wv)), InadmissiblePotential);

    CHECK_THROWS_AS(Potential::sampled({0.0, 1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(Potential::sampled({1.0, 0.0}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("potential file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "backflow_scattering_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "v.csv";
    {
        std::ofstream out(path);
        out << "x,V\n-1,0\n0,2\n1,0\n";
    }
    const auto v = Potential::parse("file:" + path.string());
    CHECK(v(0.5) == doctest::Approx(1.0));
    CHECK(v.to_spec() == "file:" + path.string());
    CHECK(admissibility(v) == doctest::Approx(2.0 * (1.0 + 1.0 / 3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(Potential::parse("file:" + (dir / "missing.csv").string()), InvalidArgument);
}

TEST_CASE("potential specs") {
    for (const char* spec : {"delta:1", "delta:-1", "well:-1,1", "well:1,1", "pt:1", "powerlaw:1,3"}) {
        CHECK(Potential::parse(spec).to_spec() == spec);
    }
    CHECK(Potential::parse("pt:2", 2.0).as<PoschlTeller>()->mass == 2.0);
    CHECK(Potential::parse("well:0,1").is_zero());
    CHECK(Potential::parse("delta:0").is_zero());
    CHECK_FALSE(Potential::parse("delta:1").is_zero());
    for (const char* bad : {"", "delta", "delta:x", "well:1", "well:1,-1", "pt:0", "pt:1.5", "gauss:1", "powerlaw:1"}) {
        CHECK_THROWS_AS(Potential::parse(bad), InvalidArgument);
    }
    CHECK_THROWS_AS(Potential::delta(1.0)(0.0), PreconditionViolation);
}

TEST_CASE("support radii") {
    CHECK(Potential::delta(1.0).support_radius() == 0.0);
    CHECK(Potential::square_well(-1.0, 2.0).support_radius() == 2.0);
    const auto pt = Potential::poschl_teller(1);
    const double l = pt.support_radius();
    CHECK(std::abs(pt(l)) <= 1.0001e-12);
    CHECK(std::abs(pt(0.99 * l)) > 1e-12);
    for (const auto& v : catalog()) CHECK(v.support_radius() >= 0.0);
    CHECK(Potential::square_well(1.0, 1.0)(1.0) == 0.5);
    CHECK(Potential::square_well(1.0, 1.0).max_abs() == 1.0);
}

TEST_CASE("delta scattering matches the matching conditions") {
    for (double g : {1.0, -1.0, 0.3, -4.0}) {
        for (double k : {0.1, 0.5, 1.0, 3.0, 10.0}) {
            for (double m : {1.0, 2.5}) {
                const auto s = solve_scattering(Potential::delta(g), k, m);
                const auto [r, t] = oracle::delta_matching(g, k, m);
                CHECK(std::abs(s.T() - t) < 1e-14);
                CHECK(std::abs(s.R() - r) < 1e-14);
                CHECK(s.unitarity_residual() <= 1e-12);
                CHECK(s.analytic());
            }
        }
    }
    const auto s = solve_scattering(Potential::delta(1.0), 1.0);
    CHECK(std::norm(s.T()) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::norm(s.R()) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(s.T() - cdouble(0.0, 1.0) / cdouble(-1.0, 1.0)) < 1e-15);
    // psi continuous at the origin, derivative jump 2 m g psi(0)
    const auto lo = s.eval(-1e-300), hi = s.eval(1e-300);
    CHECK(std::abs(lo.first - hi.first) < 1e-14);
    CHECK(std::abs((hi.second - lo.second) - 2.0 * hi.first) < 1e-14);
}

TEST_CASE("zero potentials are transparent") {
    for (const char* spec : {"delta:0", "well:0,1"}) {
        const auto v = Potential::parse(spec);
        for (double k : {0.2, 2.0}) {
            const auto s = solve_scattering(v, k);
            CHECK(s.T() == cdouble(1.0));
            CHECK(s.R() == cdouble(0.0));
            for (double x : {-3.0, 0.0, 0.7, 5.0}) CHECK(std::abs(s.value(x) - std::polar(1.0, k * x)) < 1e-15);
        }
    }
}

TEST_CASE("wavenumber and method preconditions") {
    CHECK_THROWS_AS(solve_scattering(Potential::square_well(1.0, 1.0), 0.0), NonpositiveWavenumber);
    CHECK_THROWS_AS(solve_scattering(Potential::square_well(1.0, 1.0), -1.0), NonpositiveWavenumber);
    CHECK_THROWS_AS(solve_scattering(Potential::delta(1.0), 1.0, 1.0, ScatteringMethod::Numeric), InvalidArgument);
    CHECK_THROWS_AS(log_spaced(0.0, 1.0, 4), InvalidArgument);
}

TEST_CASE("poschl-teller wells are reflectionless") {
    for (int level : {1, 2}) {
        const auto v = Potential::poschl_teller(level);
        for (double k : {0.5, 1.0, 2.0}) {
            const auto a = solve_scattering(v, k);
            const auto n = solve_scattering(v, k, 1.0, ScatteringMethod::Numeric);
            CHECK(a.analytic());
            CHECK_FALSE(n.analytic());
            CHECK(std::abs(a.R()) < 1e-6);
            CHECK(std::abs(n.R()) < 1e-6);
            CHECK(std::abs(a.T() - n.T()) < 1e-6);
        }
    }
    // a mass different from the one the well was built for is not transparent
    const auto s = solve_scattering(Potential::poschl_teller(1, 1.0), 1.0, 2.0);
    CHECK_FALSE(s.analytic());
    CHECK(std::abs(s.R()) > 1e-3);
}

TEST_CASE("unitarity over the catalog") {
    const auto ks = log_spaced(0.1, 10.0, 30);
    REQUIRE(ks.size() == 30);
    CHECK(ks.front() == 0.1);
    CHECK(ks.back() == 10.0);
    for (const auto& v : catalog()) {
        for (const auto& s : transmission_sweep(v, ks)) {
            CHECK(s.unitarity_residual() <= (s.analytic() ? 1e-12 : 1e-8));
        }
        if (v.is_delta()) continue;
        for (const auto& s : transmission_sweep(v, ks, 1.0, ScatteringMethod::Numeric)) {
            CHECK(s.unitarity_residual() <= 1e-8);
        }
    }
}

TEST_CASE("square well closed form agrees with the integrator") {
    const auto ks = log_spaced(0.1, 10.0, 30);
    for (const auto& v : {Potential::square_well(-1.0, 1.0), Potential::square_well(1.0, 1.0),
                          Potential::square_well(-3.0, 0.5)}) {
        const auto a = transmission_sweep(v, ks);
        const auto n = transmission_sweep(v, ks, 1.0, ScatteringMethod::Numeric);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            CHECK(a[i].analytic());
            CHECK(std::abs(a[i].T() - n[i].T()) <= 1e-6 * std::abs(a[i].T()));
            if (std::abs(a[i].R()) > 1e-6) CHECK(std::abs(a[i].R() - n[i].R()) <= 1e-6 * std::abs(a[i].R()));
            else CHECK(std::abs(a[i].R() - n[i].R()) <= 1e-12);
        }
    }
}

TEST_CASE("high energies are transmitted") {
    for (const auto& v : catalog()) {
        const double m = 1.0;
        const double kv = std::sqrt(2 * m * v.max_abs());
        CHECK(std::norm(solve_scattering(v, 10.0 * kv, m).T()) > 0.99);
    }
}

TEST_CASE("scattering states join their exterior forms") {
    for (const auto& v : catalog()) {
        if (v.is_delta()) continue;
        for (auto method : {ScatteringMethod::Auto, ScatteringMethod::Numeric}) {
            const auto s = solve_scattering(v, 1.0, 1.0, method);
            const double l = s.support_radius();
            const double k = s.k();
            const cdouble ik(0.0, k);
            const cdouble right = s.T() * std::exp(ik * l);
            const cdouble left = std::exp(-ik * l) + s.R() * std::exp(ik * l);
            const auto in_r = s.eval(std::nextafter(l, 0.0));
            const auto in_l = s.eval(std::nextafter(-l, 0.0));
            CHECK(std::abs(in_r.first - right) <= 1e-8 * std::abs(right));
            CHECK(std::abs(in_r.second - ik * right) <= 1e-8 * std::abs(ik * right));
            const cdouble dleft = ik * (std::exp(-ik * l) - s.R() * std::exp(ik * l));
            CHECK(std::abs(in_l.first - left) <= 1e-8 * std::abs(left));
            CHECK(std::abs(in_l.second - dleft) <= 1e-8 * std::abs(dleft));
            CHECK(eval_scattering_state(s, 2 * l) == s.T() * std::exp(ik * 2.0 * l));
        }
    }
}

TEST_CASE("interior solutions satisfy the Schrodinger equation") {
    const double h = 1e-2;
    for (const auto& v : {Potential::power_law(1.0, 3.0), Potential::poschl_teller(1), Potential::square_well(-1.0, 1.0)}) {
        for (auto method : {ScatteringMethod::Auto, ScatteringMethod::Numeric}) {
            for (double m : {1.0, 2.0}) {
                const double k = 1.3;
                const auto s = solve_scattering(v, k, m, method);
                for (double x : {-1.9, -0.6, 0.25, 0.8, 1.7, 3.4}) {
                    INFO("potential " << v.to_spec() << " mass " << m << " x " << x);
                    const cdouble psi = s.value(x);
                    // fourth-order stencil: the wide step keeps integrator noise from
                    // being amplified by 1/h^2
                    const cdouble d2 = (-s.value(x + 2 * h) + 16.0 * s.value(x + h) - 30.0 * psi +
                                        16.0 * s.value(x - h) - s.value(x - 2 * h)) /
                                       (12 * h * h);
                    const cdouble res = -d2 / (2 * m) + v(x) * psi - k * k / (2 * m) * psi;
                    CHECK(std::abs(res) < 1e-5);
                    const cdouble d1 = (s.value(x - 2 * h) - 8.0 * s.value(x - h) + 8.0 * s.value(x + h) -
                                        s.value(x + 2 * h)) /
                                       (12 * h);
                    CHECK(std::abs(d1 - s.derivative(x)) < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("transmission table") {
    const auto ks = log_spaced(0.5, 2.0, 3);
    const auto rows = transmission_sweep(Potential::delta(1.0), ks);
    const auto csv = transmission_csv(rows);
    CHECK(csv.rfind("k,re_T,im_T,re_R,im_R,abs_T2,abs_R2,unitarity_residual\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 4);
    CHECK(csv.find("\n1," + format_double(rows[1].T().real()) + ",") != std::string::npos);
}

TEST_CASE("dressed form without a potential is the free form") {
    const auto g = std::make_shared<const MomentumGrid>(make_gauss_grid(8.0, 32));
    const SmearingFunction f({{1.0, 0.4, 1.2}});
    const auto free = build_flux_matrix(g, f, 1.5);
    for (const char* spec : {"delta:0", "well:0,1"}) {
        const auto d = build_dressed_flux_matrix(g, f, Potential::parse(spec), 1.5);
        CHECK(d.kind() == FormKind::DressedFlux);
        CHECK(d.potential_spec() == spec);
        double worst = 0.0;
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t j = 0; j < 32; ++j) worst = std::max(worst, std::abs(d.entries()(i, j) - free.entries()(i, j)));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("dressed forms are hermitian") {
    const auto g = std::make_shared<const MomentumGrid>(make_gauss_grid(8.0, 64));
    const auto d = build_dressed_flux_matrix(g, kUnit, Potential::delta(1.0));
    CHECK(d.entries().hermitian_defect() <= 1e-13);
    const auto w = build_dressed_flux_matrix(*g, kUnit, Potential::square_well(-1.0, 1.0));
    CHECK(w.entries().hermitian_defect() <= 1e-13);
    CHECK(lowest_eigenpair(d).lambda_min < 0.0);
}

TEST_CASE("dressed form rejects inadmissible potentials") {
    std::vector<double> wx, wv;
    for (int i = -2000; i <= 2000; ++i) {
        wx.push_back(0.5 * i);
        wv.push_back(1.0 / (1.0 + wx.back() * wx.back()));
    }
    const auto g = std::make_shared<const MomentumGrid>(make_gauss_grid(8.0, 8));
    CHECK_THROWS_AS(build_dressed_flux_matrix(g, kUnit, Potential::sampled(wx, wv)), InadmissiblePotential);
}

TEST_CASE("dressed delta ladder settles") {
    const std::size_t ns[] = {50, 100, 200};
    const double ps[] = {8.0};
    for (double gamma : {1.0, -1.0}) {
        const auto v = Potential::delta(gamma);
        const auto r = convergence_scan(
            [&](std::shared_ptr<const MomentumGrid> g) { return build_dressed_flux_matrix(std::move(g), kUnit, v); },
            ns, ps, 2e-2);
        CHECK(r.converged);
        for (const auto& rung : r.ladder) {
            CHECK(rung.lambda_min < 0.0);
            CHECK(std::isfinite(rung.lambda_min));
        }
        const auto d = r.successive_differences();
        CHECK(d[1] <= std::max(d[0], 1e-12 * std::abs(r.ladder.back().lambda_min)));
    }
}
