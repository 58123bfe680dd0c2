#include "backflow/conventions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"
#include "backflow/quadrature.hpp"
#include "text_util.hpp"

namespace backflow {

Conventions::Conventions(double mass) : mass_(mass) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw InvalidArgument("mass must be positive, got " + format_double(mass));
    }
}

MomentumGrid::MomentumGrid(double p_max, std::vector<double> nodes, std::vector<double> weights)
    : p_max_(p_max), nodes_(std::move(nodes)), weights_(std::move(weights)) {
    sqrt_weights_.reserve(weights_.size());
    for (double w : weights_) sqrt_weights_.push_back(std::sqrt(w));
}

MomentumGrid make_gauss_grid(double p_max, std::size_t n) {
    if (!(p_max > 0.0) || !std::isfinite(p_max)) {
        throw InvalidArgument("make_gauss_grid: p_max must be positive, got " +
                              format_double(p_max));
    }
    if (n < 2) {
        throw InvalidArgument("make_gauss_grid: need at least 2 nodes, got " + std::to_string(n));
    }
    QuadratureRule rule = gauss_legendre(n, 0.0, p_max);
    return MomentumGrid(p_max, std::move(rule.nodes), std::move(rule.weights));
}

MomentumGrid MomentumGrid::from_nodes(double p_max, std::vector<double> nodes,
                                      std::vector<double> weights) {
    if (nodes.size() != weights.size() || nodes.size() < 2) {
        throw InvalidArgument("momentum grid: nodes/weights size mismatch or fewer than 2 nodes");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > 0.0) || !(nodes[i] < p_max) || !(weights[i] > 0.0)) {
            throw InvalidArgument("momentum grid: node outside (0, p_max) or nonpositive weight");
        }
        if (i > 0 && !(nodes[i] > nodes[i - 1])) {
            throw InvalidArgument("momentum grid: nodes must be strictly increasing");
        }
    }
    return MomentumGrid(p_max, std::move(nodes), std::move(weights));
}

// ---------------------------------------------------------------------------

MomentumWavefunction::MomentumWavefunction(std::shared_ptr<const MomentumGrid> grid,
                                           std::vector<cdouble> amplitudes,
                                           MomentumSupport support)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)), support_(support) {
    if (!grid_) throw InvalidArgument("wavefunction needs a grid");
    if (amplitudes_.size() != grid_->size()) {
        throw InvalidArgument("wavefunction: amplitude count does not match grid size");
    }
}

MomentumWavefunction MomentumWavefunction::from_scaled(std::shared_ptr<const MomentumGrid> grid,
                                                       std::span<const cdouble> scaled) {
    std::vector<cdouble> amp(scaled.size());
    const auto sw = grid->sqrt_weights();
    for (std::size_t i = 0; i < scaled.size() && i < sw.size(); ++i) amp[i] = scaled[i] / sw[i];
    return MomentumWavefunction(std::move(grid), std::move(amp));
}

double MomentumWavefunction::norm_squared() const {
    const auto w = grid_->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) s += w[i] * std::norm(amplitudes_[i]);
    return s;
}

MomentumWavefunction MomentumWavefunction::normalized_copy() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw InvalidArgument("cannot normalize the zero wavefunction");
    const double scale = 1.0 / std::sqrt(n2);
    std::vector<cdouble> amp(amplitudes_);
    for (auto& a : amp) a *= scale;
    return MomentumWavefunction(grid_, std::move(amp), support_);
}

std::vector<cdouble> MomentumWavefunction::scaled_amplitudes() const {
    const auto sw = grid_->sqrt_weights();
    std::vector<cdouble> out(amplitudes_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sw[i] * amplitudes_[i];
    return out;
}

MomentumWavefunction MomentumWavefunction::time_reversed() const {
    std::vector<cdouble> amp(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), amp.begin(),
                   [](cdouble a) { return std::conj(a); });
    const auto flipped = support_ == MomentumSupport::Positive ? MomentumSupport::Negative
                                                                : MomentumSupport::Positive;
    return MomentumWavefunction(grid_, std::move(amp), flipped);
}

double MomentumWavefunction::physical_momentum(std::size_t i) const {
    const double p = grid_->nodes()[i];
    return support_ == MomentumSupport::Positive ? p : -p;
}

// ---------------------------------------------------------------------------

SmearingFunction SmearingFunction::gaussian(double center, double width, double amplitude) {
    return SmearingFunction({Term{amplitude, center, width}});
}

SmearingFunction::SmearingFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("smearing function needs at least one term");
    for (const auto& t : terms_) {
        if (!(t.width > 0.0) || !std::isfinite(t.width)) {
            throw InvalidArgument("smearing width must be positive");
        }
        if (!(t.amplitude >= 0.0) || !std::isfinite(t.amplitude)) {
            throw InvalidArgument("smearing amplitudes must be nonnegative (f >= 0)");
        }
        if (!std::isfinite(t.center)) throw InvalidArgument("smearing center must be finite");
    }
}

double SmearingFunction::operator()(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        const double u = (x - t.center) / t.width;
        s += t.amplitude * std::exp(-0.5 * u * u);
    }
    return s;
}

double SmearingFunction::cumulative(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        const double u = (x - t.center) / (t.width * std::sqrt(2.0));
        s += t.amplitude * t.width * std::sqrt(kPi / 2.0) * std::erfc(-u);
    }
    return s;
}

double SmearingFunction::integral() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.amplitude * t.width * std::sqrt(2.0 * kPi);
    return s;
}

double SmearingFunction::peak_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.amplitude;
    return s;
}

std::complex<double> SmearingFunction::fourier(double k) const {
    cdouble s = 0.0;
    for (const auto& t : terms_) {
        const double mag = t.amplitude * t.width * std::sqrt(2.0 * kPi) *
                           std::exp(-0.5 * t.width * t.width * k * k);
        s += std::polar(mag, -t.center * k);
    }
    return s;
}

double SmearingFunction::window_lo() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) lo = std::min(lo, t.center - 10.0 * t.width);
    return lo;
}

double SmearingFunction::window_hi() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) hi = std::max(hi, t.center + 10.0 * t.width);
    return hi;
}

SmearingFunction SmearingFunction::dilated(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidArgument("dilation factor must be positive");
    std::vector<Term> out(terms_.begin(), terms_.end());
    for (auto& t : out) {
        t.center *= lambda;
        t.width *= lambda;
    }
    return SmearingFunction(std::move(out));
}

std::string SmearingFunction::to_spec() const {
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) out += '+';
        out += "gaussian:" + format_double(t.center) + "," + format_double(t.width);
        if (t.amplitude != 1.0) out += "," + format_double(t.amplitude);
    }
    return out;
}

SmearingFunction SmearingFunction::parse(const std::string& spec) {
    static const std::string tag = "gaussian:";
    if (spec.rfind(tag, 0) != 0) {
        throw InvalidArgument("smearing spec must start with 'gaussian:', got '" + spec + "'");
    }
    std::vector<Term> terms;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        if (spec.compare(pos, tag.size(), tag) != 0) {
            throw InvalidArgument("malformed smearing spec '" + spec + "'");
        }
        pos += tag.size();
        std::size_t next = spec.find("+" + tag, pos);
        const std::string body = spec.substr(pos, next == std::string::npos ? std::string::npos
                                                                             : next - pos);
        const auto fields = detail::parse_number_list(body);
        if (fields.size() < 2 || fields.size() > 3) {
            throw InvalidArgument("gaussian smearing needs c,w[,amplitude], got '" + body + "'");
        }
        terms.push_back(Term{fields.size() == 3 ? fields[2] : 1.0, fields[0], fields[1]});
        pos = next == std::string::npos ? spec.size() : next + 1;
    }
    return SmearingFunction(std::move(terms));
}

std::complex<double> smearing_fourier(const SmearingFunction& f, double k) {
    return f.fourier(k);
}

// ---------------------------------------------------------------------------

PositionGrid::PositionGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (!(x_min < 0.0) || !(x_max > 0.0)) {
        throw InvalidArgument("position grid must satisfy x_min < 0 < x_max");
    }
    if (n_points < 2 || (n_points & (n_points - 1)) != 0) {
        throw InvalidArgument("position grid size must be a power of two, got " +
                              std::to_string(n_points));
    }
}

std::ptrdiff_t PositionGrid::origin_index() const noexcept {
    const double j = -x_min_ / dx();
    const double r = std::round(j);
    if (std::abs(j - r) > 1e-9 || r < 0 || r >= static_cast<double>(n_)) return -1;
    return static_cast<std::ptrdiff_t>(r);
}

std::vector<cdouble> momentum_to_position(const MomentumWavefunction& phi,
                                          const PositionGrid& grid) {
    const MomentumGrid& mg = phi.grid();
    if (grid.dx() > kPi / mg.p_max()) {
        throw ResolutionError("momentum_to_position: dx = " + format_double(grid.dx()) +
                              " exceeds pi / p_max = " + format_double(kPi / mg.p_max()));
    }
    const auto w = mg.weights();
    const auto amp = phi.amplitudes();
    std::vector<cdouble> coeff(amp.size());
    std::vector<double> p(amp.size());
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t i = 0; i < amp.size(); ++i) {
        coeff[i] = norm * w[i] * amp[i];
        p[i] = phi.physical_momentum(i);
    }
    std::vector<cdouble> psi(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        cdouble acc = 0.0;
        for (std::size_t i = 0; i < coeff.size(); ++i) acc += coeff[i] * std::polar(1.0, p[i] * x);
        psi[j] = acc;
    }
    return psi;
}

double position_norm_squared(std::span<const cdouble> psi, const PositionGrid& grid) {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    return s * grid.dx();
}

// ---------------------------------------------------------------------------

std::string wavefunction_csv(const MomentumWavefunction& phi) {
    std::string out = "p,weight,re,im\n";
    const auto w = phi.grid().weights();
    const auto amp = phi.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        out += format_double(phi.physical_momentum(i));
        out += ',';
        out += format_double(w[i]);
        out += ',';
        out += format_double(amp[i].real());
        out += ',';
        out += format_double(amp[i].imag());
        out += '\n';
    }
    return out;
}

void write_wavefunction_csv(const std::filesystem::path& path, const MomentumWavefunction& phi) {
    write_text_file(path, wavefunction_csv(phi));
}

MomentumWavefunction parse_wavefunction_csv(const std::string& csv) {
    const auto rows = detail::parse_csv(csv, {"p", "weight", "re", "im"});
    if (rows.empty()) throw InvalidArgument("wavefunction CSV has no rows");
    const bool negative = rows.front()[0] < 0.0;
    std::vector<double> nodes, weights;
    std::vector<cdouble> amp;
    for (const auto& r : rows) {
        if ((r[0] < 0.0) != negative) {
            throw InvalidArgument("wavefunction CSV mixes positive and negative momenta");
        }
        nodes.push_back(std::abs(r[0]));
        weights.push_back(r[1]);
        amp.emplace_back(r[2], r[3]);
    }
    // Left-to-right summation keeps the recovered p_max independent of row order.
    const double p_max = std::accumulate(weights.begin(), weights.end(), 0.0);
    auto grid = std::make_shared<const MomentumGrid>(
        MomentumGrid::from_nodes(p_max, std::move(nodes), std::move(weights)));
    return MomentumWavefunction(std::move(grid), std::move(amp),
                                negative ? MomentumSupport::Negative : MomentumSupport::Positive);
}

MomentumWavefunction read_wavefunction_csv(const std::filesystem::path& path) {
    return parse_wavefunction_csv(read_text_file(path));
}

}  // namespace backflow
