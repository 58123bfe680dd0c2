#include "backflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"
#include "fft.hpp"

namespace backflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> fft_wavenumbers(const PositionGrid& grid) {
    const std::size_t n = grid.size();
    const double dk = 2.0 * kPi / (static_cast<double>(n) * grid.dx());
    std::vector<double> k(n);
    for (std::size_t m = 0; m < n; ++m) {
        const auto mm = static_cast<double>(m);
        k[m] = (m < n / 2 ? mm : mm - static_cast<double>(n)) * dk;
    }
    return k;
}

std::vector<cdouble> derivative_with(detail::FftPlan& plan, std::span<const cdouble> psi,
                                     const std::vector<double>& k) {
    std::vector<cdouble> d(psi.begin(), psi.end());
    plan.forward(d);
    const double inv = 1.0 / static_cast<double>(d.size());
    for (std::size_t m = 0; m < d.size(); ++m) d[m] *= cdouble(0.0, k[m] * inv);
    // The Nyquist mode has no odd partner; drop it from the derivative.
    if (d.size() % 2 == 0) d[d.size() / 2] = 0.0;
    plan.backward(d);
    return d;
}

double edge_amplitude(std::span<const cdouble> psi) {
    return std::max(std::abs(psi.front()), std::abs(psi.back()));
}

}  // namespace

void EvolutionConfig::validate() const {
    Conventions conv(mass);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
    if (sample_every == 0) throw InvalidArgument("sample_every must be at least 1");
    if (!(leak_tolerance > 0.0)) throw InvalidArgument("leak tolerance must be positive");
    const double kn = grid.k_nyquist();
    const double rotation = dt * kn * kn / (2.0 * conv.mass());
    if (!(rotation < 0.5)) {
        throw InvalidArgument("dt (pi/dx)^2 / (2m) = " + format_double(rotation) +
                              " must stay below 0.5");
    }
    if (potential && potential->is_delta()) {
        throw InvalidArgument("the delta potential is not supported in time evolution");
    }
}

std::size_t EvolutionConfig::steps() const {
    return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

PacketMoments packet_moments(std::span<const cdouble> psi, const PositionGrid& grid) {
    if (psi.size() != grid.size()) throw InvalidArgument("wavefunction does not match the grid");
    PacketMoments m;
    const double dx = grid.dx();
    double sx = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double p = std::norm(psi[j]) * dx;
        const double x = grid.x(j);
        m.norm += p;
        sx += p * x;
        sxx += p * x * x;
    }
    m.mean_x = sx / m.norm;
    m.sigma_x = std::sqrt(std::max(0.0, sxx / m.norm - m.mean_x * m.mean_x));

    const auto marginal = momentum_marginal(psi, grid);
    const auto k = fft_wavenumbers(grid);
    double s = 0.0, sk = 0.0, skk = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        s += marginal[i];
        sk += marginal[i] * k[i];
        skk += marginal[i] * k[i] * k[i];
    }
    m.mean_p = sk / s;
    m.sigma_p = std::sqrt(std::max(0.0, skk / s - m.mean_p * m.mean_p));
    return m;
}

void check_box(std::span<const cdouble> psi0, const EvolutionConfig& cfg) {
    const auto m = packet_moments(psi0, cfg.grid);
    const double need = std::abs(m.mean_x) + (std::abs(m.mean_p) + 5.0 * m.sigma_p) * cfg.t_max / cfg.mass +
                        10.0 * m.sigma_x;
    const double have = std::min(-cfg.grid.x_min(), cfg.grid.x_max());
    if (have < need) {
        throw PreconditionViolation("box half-width " + format_double(have) + " is below the required " +
                                    format_double(need));
    }
}

std::vector<cdouble> gaussian_packet(const PositionGrid& grid, double x0, double p0, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("packet width must be positive");
    std::vector<cdouble> psi(grid.size());
    double norm = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double x = grid.x(j);
        const double u = (x - x0) / sigma;
        psi[j] = std::exp(-0.25 * u * u) * std::polar(1.0, p0 * x);
        norm += std::norm(psi[j]);
    }
    const double scale = 1.0 / std::sqrt(norm * grid.dx());
    for (auto& z : psi) z *= scale;
    return psi;
}

std::vector<double> momentum_marginal(std::span<const cdouble> psi, const PositionGrid& grid) {
    if (psi.size() != grid.size()) throw InvalidArgument("wavefunction does not match the grid");
    detail::FftPlan plan(psi.size());
    std::vector<cdouble> d(psi.begin(), psi.end());
    plan.forward(d);
    const double scale = grid.dx() / static_cast<double>(psi.size());
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = std::norm(d[i]) * scale;
    return out;
}

std::vector<cdouble> spectral_derivative(std::span<const cdouble> psi, const PositionGrid& grid) {
    if (psi.size() != grid.size()) throw InvalidArgument("wavefunction does not match the grid");
    detail::FftPlan plan(psi.size());
    return derivative_with(plan, psi, fft_wavenumbers(grid));
}

void split_step_evolve(std::span<const cdouble> psi0, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer) {
    cfg.validate();
    const auto& grid = cfg.grid;
    const std::size_t n = grid.size();
    if (psi0.size() != n) throw InvalidArgument("initial state does not match the grid");
    const double norm = position_norm_squared(psi0, grid);
    if (std::abs(norm - 1.0) > 1e-8) {
        throw PreconditionViolation("initial state must be normalized, norm^2 = " + format_double(norm));
    }
    if (cfg.enforce_box_rule) check_box(psi0, cfg);

    const bool with_potential = cfg.potential && !cfg.potential->is_zero();
    std::vector<cdouble> vhalf;
    if (with_potential) {
        vhalf.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            vhalf[j] = std::polar(1.0, -0.5 * cfg.dt * (*cfg.potential)(grid.x(j)));
        }
    }
    const auto k = fft_wavenumbers(grid);
    std::vector<cdouble> kin(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        kin[m] = std::polar(inv, -cfg.dt * k[m] * k[m] / (2.0 * cfg.mass));
    }

    detail::FftPlan plan(n);
    std::vector<cdouble> psi(psi0.begin(), psi0.end());
    auto emit = [&](std::size_t step) {
        const double edge = edge_amplitude(psi);
        if (edge > cfg.leak_tolerance) {
            throw BoundaryLeak("|psi| = " + format_double(edge) + " at the box edge at t = " +
                               format_double(static_cast<double>(step) * cfg.dt));
        }
        if (observer) observer(static_cast<double>(step) * cfg.dt, psi);
    };

    emit(0);
    const std::size_t steps = cfg.steps();
    for (std::size_t s = 1; s <= steps; ++s) {
        if (with_potential) {
            for (std::size_t j = 0; j < n; ++j) psi[j] *= vhalf[j];
        }
        plan.forward(psi);
        for (std::size_t m = 0; m < n; ++m) psi[m] *= kin[m];
        plan.backward(psi);
        if (with_potential) {
            for (std::size_t j = 0; j < n; ++j) psi[j] *= vhalf[j];
        }
        if (s % cfg.sample_every == 0) emit(s);
    }
}

Trajectory split_step_evolve(std::span<const cdouble> psi0, const EvolutionConfig& cfg) {
    Trajectory out{cfg.grid, cfg.mass, {}};
    split_step_evolve(psi0, cfg, [&](double t, std::span<const cdouble> psi) {
        out.samples.push_back(Snapshot{t, std::vector<cdouble>(psi.begin(), psi.end())});
    });
    return out;
}

double DiagnosticsSeries::max_residual() const {
    double m = 0.0;
    for (double r : residual) {
        if (std::isfinite(r)) m = std::max(m, r);
    }
    return m;
}

double DiagnosticsSeries::max_smeared_residual() const {
    if (jf.empty() || !std::isfinite(jf.front())) return kNaN;
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        const double d = (p_f[i + 1] - p_f[i - 1]) / (times[i + 1] - times[i - 1]);
        m = std::max(m, std::abs(d - jf[i]));
    }
    return m;
}

struct DiagnosticsRecorder::Impl {
    PositionGrid grid;
    double mass;
    std::optional<SmearingFunction> f;
    std::size_t origin;
    std::vector<double> k;
    std::vector<double> fx;
    std::vector<double> cum;
    detail::FftPlan plan;
    DiagnosticsSeries series;

    Impl(const PositionGrid& g, double m, std::optional<SmearingFunction> sm)
        : grid(g), mass(m), f(std::move(sm)), origin(0), k(fft_wavenumbers(g)), plan(g.size()) {
        const auto o = grid.origin_index();
        if (o < 0) throw PreconditionViolation("x = 0 must be a grid point for P_right");
        origin = static_cast<std::size_t>(o);
        if (f) {
            fx.resize(grid.size());
            cum.resize(grid.size());
            for (std::size_t j = 0; j < grid.size(); ++j) {
                fx[j] = (*f)(grid.x(j));
                cum[j] = f->cumulative(grid.x(j));
            }
        }
    }
};

DiagnosticsRecorder::DiagnosticsRecorder(const PositionGrid& grid, double mass,
                                         std::optional<SmearingFunction> f)
    : impl_(std::make_unique<Impl>(grid, Conventions(mass).mass(), std::move(f))) {}

DiagnosticsRecorder::~DiagnosticsRecorder() = default;

void DiagnosticsRecorder::record(double t, std::span<const cdouble> psi) {
    auto& s = *impl_;
    const std::size_t n = s.grid.size();
    if (psi.size() != n) throw InvalidArgument("snapshot does not match the grid");
    const double dx = s.grid.dx();

    double pr = 0.5 * std::norm(psi[s.origin]);
    for (std::size_t j = s.origin + 1; j < n; ++j) pr += std::norm(psi[j]);
    pr *= dx;

    const auto d = derivative_with(s.plan, psi, s.k);
    const double j0 = std::imag(std::conj(psi[s.origin]) * d[s.origin]) / s.mass;
    double jf = kNaN, pf = kNaN;
    if (s.f) {
        jf = 0.0;
        pf = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            jf += s.fx[j] * std::imag(std::conj(psi[j]) * d[j]);
            pf += s.cum[j] * std::norm(psi[j]);
        }
        jf *= dx / s.mass;
        pf *= dx;
    }
    s.series.times.push_back(t);
    s.series.p_right.push_back(pr);
    s.series.j0.push_back(j0);
    s.series.jf.push_back(jf);
    s.series.p_f.push_back(pf);
}

SnapshotObserver DiagnosticsRecorder::observer() {
    return [this](double t, std::span<const cdouble> psi) { record(t, psi); };
}

DiagnosticsSeries DiagnosticsRecorder::finish() const {
    DiagnosticsSeries out = impl_->series;
    const std::size_t n = out.times.size();
    out.residual.assign(n, kNaN);
    if (n >= 3) {
        const double step = out.times[1] - out.times[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double gap = out.times[i] - out.times[i - 1];
            if (std::abs(gap - step) > 1e-9 * std::max(1.0, std::abs(step))) {
                throw PreconditionViolation("diagnostics need uniformly spaced samples");
            }
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double dp = (out.p_right[i + 1] - out.p_right[i - 1]) / (out.times[i + 1] - out.times[i - 1]);
            out.residual[i] = std::abs(dp - out.j0[i]);
        }
    }
    return out;
}

DiagnosticsSeries diagnostics(const Trajectory& trajectory, const std::optional<SmearingFunction>& f) {
    DiagnosticsRecorder rec(trajectory.grid, trajectory.mass, f);
    for (const auto& s : trajectory.samples) rec.record(s.t, s.psi);
    return rec.finish();
}

std::string diagnostics_csv(const DiagnosticsSeries& d) {
    std::string out = "t,P_right,j0,residual,Jf\n";
    for (std::size_t i = 0; i < d.times.size(); ++i) {
        out += format_double(d.times[i]);
        out += ',';
        out += format_double(d.p_right[i]);
        out += ',';
        out += format_double(d.j0[i]);
        out += ',';
        out += format_double(d.residual[i]);
        out += ',';
        out += format_double(d.jf[i]);
        out += '\n';
    }
    return out;
}

std::string snapshot_csv(const PositionGrid& grid, std::span<const cdouble> psi) {
    std::string out = "x,re,im\n";
    for (std::size_t j = 0; j < psi.size(); ++j) {
        out += format_double(grid.x(j));
        out += ',';
        out += format_double(psi[j].real());
        out += ',';
        out += format_double(psi[j].imag());
        out += '\n';
    }
    return out;
}

double smeared_flux_position(const MomentumWavefunction& phi, const SmearingFunction& f, double mass) {
    if (phi.support() != MomentumSupport::Positive) {
        throw PreconditionViolation("state is not in the positive-momentum subspace");
    }
    double w_min = std::numeric_limits<double>::infinity();
    double reach = 0.0;
    for (const auto& t : f.terms()) {
        w_min = std::min(w_min, t.width);
        reach = std::max(reach, std::abs(t.center) + 16.0 * t.width);
    }
    const double dx_target = std::min(w_min / 64.0, kPi / (8.0 * phi.grid().p_max()));
    std::size_t n = 2;
    while (2.0 * reach / static_cast<double>(n) > dx_target) n *= 2;
    const PositionGrid grid(-reach, reach, n);
    const auto psi = momentum_to_position(phi, grid);
    return flux_expectation_position(psi, grid, f, mass);
}

BackflowReport backflow_demonstration(const MomentumWavefunction& v, const FluxFormMatrix& a,
                                      EvolutionConfig cfg) {
    if (v.support() != MomentumSupport::Positive) {
        throw PreconditionViolation("backflow needs a positive-momentum state");
    }
    if (a.kind() != FormKind::FreeFlux) {
        throw PreconditionViolation("backflow demonstration runs on the free flux form");
    }
    if (cfg.potential && !cfg.potential->is_zero()) {
        throw PreconditionViolation("backflow demonstration evolves freely");
    }
    if (v.grid().size() != a.size()) throw InvalidArgument("state and form use different grids");

    const auto phi = v.normalized_copy();
    BackflowReport r;
    r.lambda = a.expectation(phi);
    r.jf0_position = smeared_flux_position(phi, a.smearing(), a.mass());
    r.relative_mismatch = std::abs(r.jf0_position - r.lambda) / std::abs(r.lambda);
    r.sign_agreement = (r.jf0_position < 0.0) == (r.lambda < 0.0);
    r.backflow = r.jf0_position < 0.0;

    const auto scaled = phi.scaled_amplitudes();
    auto av = a.entries().multiply(scaled);
    for (std::size_t i = 0; i < av.size(); ++i) av[i] -= r.lambda * scaled[i];
    const bool eigenvector = norm2(av) <= 1e-8 * a.entries().frobenius_norm();
    if (!(r.lambda < 0.0) || !eigenvector) return r;

    // phi(k) = (1/lambda) sum_j K(k, p_j) w_j phi_j, sampled on the FFT modes
    // in [0, p_max] (trapezoid weight 1/2 at the ends).
    const auto& grid = cfg.grid;
    const std::size_t n = grid.size();
    const double dk = 2.0 * kPi / (static_cast<double>(n) * grid.dx());
    const auto& mg = a.grid();
    if (mg.p_max() >= grid.k_nyquist()) {
        throw ResolutionError("evolution grid cannot represent momenta up to p_max");
    }
    const auto p = mg.nodes();
    const auto w = mg.weights();
    const auto amp = phi.amplitudes();
    std::vector<cdouble> psi(n, 0.0);
    for (std::size_t m = 0; m < n / 2; ++m) {
        const double km = static_cast<double>(m) * dk;
        if (km > mg.p_max()) break;
        cdouble acc = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            acc += free_flux_kernel(km, p[j], a.smearing(), a.mass()) * w[j] * amp[j];
        }
        double weight = dk / std::sqrt(2.0 * kPi);
        if (m == 0 || std::abs(km - mg.p_max()) < 1e-12 * mg.p_max()) weight *= 0.5;
        psi[m] = weight * acc / r.lambda * std::polar(1.0, km * grid.x_min());
    }
    detail::FftPlan plan(n);
    plan.backward(psi);
    r.initial_norm = position_norm_squared(psi, grid);
    const double scale = 1.0 / std::sqrt(r.initial_norm);
    for (auto& z : psi) z *= scale;

    cfg.enforce_box_rule = false;
    cfg.leak_tolerance = std::max(cfg.leak_tolerance, 2.0 * edge_amplitude(psi));
    DiagnosticsRecorder rec(grid, a.mass(), a.smearing());
    split_step_evolve(psi, cfg, rec.observer());
    r.series = rec.finish();
    r.evolved = true;

    const auto& s = r.series;
    std::size_t sharp = 0, smeared = 0;
    for (std::size_t i = 1; i + 1 < s.times.size(); ++i) {
        if (!(s.jf[i] < 0.0)) continue;
        ++r.negative_flux_samples;
        if (s.p_right[i + 1] < s.p_right[i - 1]) ++sharp;
        if (s.p_f[i + 1] < s.p_f[i - 1]) ++smeared;
    }
    if (r.negative_flux_samples > 0) {
        r.p_right_agreement = static_cast<double>(sharp) / static_cast<double>(r.negative_flux_samples);
        r.p_f_agreement = static_cast<double>(smeared) / static_cast<double>(r.negative_flux_samples);
    }
    return r;
}

}  // namespace backflow
