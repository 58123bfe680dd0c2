#include "backflow/potential.hpp"

#include <algorithm>
#include <cmath>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"
#include "text_util.hpp"

namespace backflow {

namespace {

constexpr double kNegligible = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double pt_strength(const PoschlTeller& p) {
    return p.level * (p.level + 1.0) / (2.0 * p.mass);
}

double sampled_value(const SampledPotential& s, double x) {
    if (x < s.x.front() || x > s.x.back()) return 0.0;
    auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
    if (it == s.x.end()) return s.v.back();
    const auto j = static_cast<std::size_t>(it - s.x.begin());
    const double t = (x - s.x[j - 1]) / (s.x[j] - s.x[j - 1]);
    return s.v[j - 1] + t * (s.v[j] - s.v[j - 1]);
}

}  // namespace

Potential Potential::delta(double strength) {
    if (!std::isfinite(strength)) throw InvalidArgument("delta strength must be finite");
    return Potential(DeltaPotential{strength});
}

Potential Potential::square_well(double depth, double half_width) {
    if (!std::isfinite(depth)) throw InvalidArgument("well depth must be finite");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw InvalidArgument("well half-width must be positive");
    }
    return Potential(SquareWell{depth, half_width});
}

Potential Potential::poschl_teller(int level, double mass) {
    if (level < 1) throw InvalidArgument("Poschl-Teller level must be a positive integer");
    if (!(mass > 0.0)) throw InvalidArgument("mass must be positive");
    return Potential(PoschlTeller{level, mass});
}

Potential Potential::power_law(double scale, double alpha) {
    if (!std::isfinite(scale) || !std::isfinite(alpha) || !(alpha > 0.0)) {
        throw InvalidArgument("power-law needs finite scale and positive exponent");
    }
    const double cutoff =
        scale == 0.0 ? 0.0 : std::max(0.0, std::pow(std::abs(scale) / kNegligible, 1.0 / alpha) - 1.0);
    return Potential(PowerLaw{scale, alpha, cutoff});
}

Potential Potential::sampled(std::vector<double> x, std::vector<double> v, std::string source) {
    if (x.size() != v.size() || x.size() < 2) {
        throw InvalidArgument("sampled potential needs at least two (x, V) pairs");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(v[i])) {
            throw InvalidArgument("sampled potential contains non-finite values");
        }
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw InvalidArgument("sampled potential abscissae must be strictly increasing");
        }
    }
    return Potential(SampledPotential{std::move(x), std::move(v), std::move(source)});
}

Potential Potential::parse(const std::string& spec, double mass) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InvalidArgument("potential spec needs 'kind:params': " + spec);
    const std::string kind = detail::trim(spec.substr(0, colon));
    const std::string rest = spec.substr(colon + 1);
    auto numbers = [&](std::size_t count) {
        auto v = detail::parse_number_list(rest);
        if (v.size() != count) {
            throw InvalidArgument("potential '" + kind + "' expects " + std::to_string(count) +
                                  " parameter(s): " + spec);
        }
        return v;
    };
    if (kind == "delta") return delta(numbers(1)[0]);
    if (kind == "well") {
        const auto v = numbers(2);
        return square_well(v[0], v[1]);
    }
    if (kind == "pt") {
        const double l = numbers(1)[0];
        if (l != std::floor(l) || l < 1 || l > 1000) {
            throw InvalidArgument("Poschl-Teller level must be a positive integer: " + spec);
        }
        return poschl_teller(static_cast<int>(l), mass);
    }
    if (kind == "powerlaw") {
        const auto v = numbers(2);
        return power_law(v[0], v[1]);
    }
    if (kind == "file") {
        const std::string path = detail::trim(rest);
        std::string text;
        try {
            text = read_text_file(path);
        } catch (const std::exception& e) {
            throw InvalidArgument("cannot read potential file '" + path + "': " + e.what());
        }
        const auto rows = detail::parse_csv(text, {"x", "V"});
        std::vector<double> x, v;
        for (const auto& r : rows) {
            x.push_back(r[0]);
            v.push_back(r[1]);
        }
        return sampled(std::move(x), std::move(v), path);
    }
    throw InvalidArgument("unknown potential kind '" + kind + "'");
}

std::string Potential::to_spec() const {
    return std::visit(
        overloaded{
            [](const DeltaPotential& d) { return "delta:" + format_double(d.strength); },
            [](const SquareWell& w) {
                return "well:" + format_double(w.depth) + "," + format_double(w.half_width);
            },
            [](const PoschlTeller& p) { return "pt:" + std::to_string(p.level); },
            [](const PowerLaw& p) {
                return "powerlaw:" + format_double(p.scale) + "," + format_double(p.alpha);
            },
            [](const SampledPotential& s) {
                return s.source.empty() ? std::string("file:<memory>") : "file:" + s.source;
            },
        },
        v_);
}

bool Potential::is_zero() const { return max_abs() == 0.0; }

double Potential::operator()(double x) const {
    return std::visit(
        overloaded{
            [](const DeltaPotential&) -> double {
                throw PreconditionViolation("delta potential has no pointwise values");
            },
            [x](const SquareWell& w) {
                const double ax = std::abs(x);
                if (ax < w.half_width) return w.depth;
                if (ax == w.half_width) return 0.5 * w.depth;
                return 0.0;
            },
            [x](const PoschlTeller& p) {
                const double c = std::cosh(x);
                return -pt_strength(p) / (c * c);
            },
            [x](const PowerLaw& p) {
                const double ax = std::abs(x);
                return ax > p.cutoff ? 0.0 : p.scale * std::pow(1.0 + ax, -p.alpha);
            },
            [x](const SampledPotential& s) { return sampled_value(s, x); },
        },
        v_);
}

double Potential::support_radius() const {
    return std::visit(
        overloaded{
            [](const DeltaPotential&) { return 0.0; },
            [](const SquareWell& w) { return w.depth == 0.0 ? 0.0 : w.half_width; },
            [](const PoschlTeller& p) {
                const double c = pt_strength(p);
                if (c <= kNegligible) return 0.0;
                return std::acosh(std::sqrt(c / kNegligible));
            },
            [](const PowerLaw& p) { return p.cutoff; },
            [](const SampledPotential& s) {
                double r = 0.0;
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (std::abs(s.v[i]) >= kNegligible) {
                        // the interpolant reaches out to the neighbouring samples
                        const std::size_t lo = i > 0 ? i - 1 : i;
                        const std::size_t hi = i + 1 < s.x.size() ? i + 1 : i;
                        r = std::max({r, std::abs(s.x[lo]), std::abs(s.x[hi])});
                    }
                }
                return r;
            },
        },
        v_);
}

double Potential::max_abs() const {
    return std::visit(
        overloaded{
            [](const DeltaPotential& d) { return std::abs(d.strength); },
            [](const SquareWell& w) { return std::abs(w.depth); },
            [](const PoschlTeller& p) { return pt_strength(p); },
            [](const PowerLaw& p) { return std::abs(p.scale); },
            [](const SampledPotential& s) {
                double m = 0.0;
                for (double v : s.v) m = std::max(m, std::abs(v));
                return m;
            },
        },
        v_);
}

std::vector<double> Potential::breakpoints() const {
    const double l = support_radius();
    return std::visit(
        overloaded{
            [](const DeltaPotential&) { return std::vector<double>{0.0}; },
            [](const SquareWell& w) { return std::vector<double>{-w.half_width, w.half_width}; },
            [](const PoschlTeller&) { return std::vector<double>{}; },
            [](const PowerLaw&) { return std::vector<double>{0.0}; },
            [l](const SampledPotential& s) {
                std::vector<double> out;
                for (double x : s.x) {
                    if (std::abs(x) <= l) out.push_back(x);
                }
                return out;
            },
        },
        v_);
}

double sampled_weighted_norm(const SampledPotential& s, double r) {
    // Each linear piece is cut at x = 0 and at its root, leaving pieces on
    // which (1 + |x|) |V| is a quadratic; two-point Gauss is exact there.
    const double g = 1.0 / std::sqrt(3.0);
    auto piece = [&](double a, double b, double va, double vb) {
        const double ca = std::max(a, -r), cb = std::min(b, r);
        if (!(cb > ca)) return 0.0;
        auto value = [&](double x) { return va + (vb - va) * (x - a) / (b - a); };
        std::vector<double> cuts{ca, cb};
        if (ca < 0.0 && cb > 0.0) cuts.push_back(0.0);
        if ((va < 0.0) != (vb < 0.0) && va != vb) {
            const double root = a - va * (b - a) / (vb - va);
            if (root > ca && root < cb) cuts.push_back(root);
        }
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            const double half = 0.5 * (cuts[i + 1] - cuts[i]);
            for (double t : {-g, g}) {
                const double x = mid + half * t;
                acc += half * (1.0 + std::abs(x)) * std::abs(value(x));
            }
        }
        return acc;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) total += piece(s.x[i], s.x[i + 1], s.v[i], s.v[i + 1]);
    return total;
}

double admissibility(const Potential& v) {
    return std::visit(
        overloaded{
            [](const DeltaPotential& d) { return std::abs(d.strength); },
            [](const SquareWell& w) {
                return std::abs(w.depth) * (2.0 * w.half_width + w.half_width * w.half_width);
            },
            [](const PoschlTeller& p) { return pt_strength(p) * (2.0 + 2.0 * std::log(2.0)); },
            [](const PowerLaw& p) {
                if (p.alpha <= 2.0) {
                    throw InadmissiblePotential("power-law exponent " + format_double(p.alpha) +
                                                " <= 2: weighted norm diverges");
                }
                return 2.0 * std::abs(p.scale) / (p.alpha - 2.0);
            },
            [](const SampledPotential& s) {
                const double extent = std::max(std::abs(s.x.front()), std::abs(s.x.back()));
                const double r0 = extent / 4.0;
                const double i1 = sampled_weighted_norm(s, r0);
                const double i2 = sampled_weighted_norm(s, 2.0 * r0);
                const double i4 = sampled_weighted_norm(s, 4.0 * r0);
                const double d1 = i2 - i1;
                const double d2 = i4 - i2;
                // data that falls to zero at both ends declares compact support
                const bool closed = std::abs(s.v.front()) <= 1e-12 && std::abs(s.v.back()) <= 1e-12;
                if (!closed && d2 > 0.0 && d1 / d2 < 1.5) {
                    throw InadmissiblePotential(
                        "weighted norm keeps growing under window doubling (tail increments " +
                        format_double(d1) + ", " + format_double(d2) + ")");
                }
                return i4;
            },
        },
        v.variant());
}

}  // namespace backflow
