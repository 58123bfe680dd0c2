#include "backflow/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "backflow/conventions.hpp"
#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"
#include "backflow/parallel.hpp"

namespace backflow {

namespace {

constexpr cdouble kI{0.0, 1.0};

cdouble expi(double phase) { return std::polar(1.0, phase); }

// sin(q z) / q, finite as q -> 0
cdouble sinc_q(cdouble q, double z) {
    const cdouble qz = q * z;
    if (std::abs(qz) < 1e-4) {
        const cdouble s = qz * qz;
        return z * (1.0 - s / 6.0 + s * s / 120.0);
    }
    return std::sin(qz) / q;
}

class PlaneWave final : public detail::InteriorSolution {
public:
    PlaneWave(double k, cdouble t) : k_(k), t_(t) {}
    std::pair<cdouble, cdouble> eval(double x) const override {
        const cdouble e = t_ * expi(k_ * x);
        return {e, kI * k_ * e};
    }

private:
    double k_;
    cdouble t_;
};

class WellInterior final : public detail::InteriorSolution {
public:
    WellInterior(cdouble q, double a, cdouble psi_a, cdouble dpsi_a)
        : q_(q), a_(a), psi_a_(psi_a), dpsi_a_(dpsi_a) {}
    std::pair<cdouble, cdouble> eval(double x) const override {
        const double z = x - a_;
        const cdouble c = std::cos(q_ * z);
        const cdouble s = sinc_q(q_, z);
        return {psi_a_ * c + dpsi_a_ * s, -psi_a_ * q_ * q_ * s + dpsi_a_ * c};
    }

private:
    cdouble q_;
    double a_;
    cdouble psi_a_;
    cdouble dpsi_a_;
};

// P_0 = 1, P_n(t) = (n t - ik) P_{n-1} - (1 - t^2) P'_{n-1}, polynomial in t = tanh x.
std::vector<cdouble> pt_polynomial(int level, double k) {
    std::vector<cdouble> p{1.0};
    for (int n = 1; n <= level; ++n) {
        std::vector<cdouble> next(p.size() + 1, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            next[j + 1] += static_cast<double>(n) * p[j];
            next[j] -= kI * k * p[j];
        }
        // -(1 - t^2) P' = -P' + t^2 P'
        for (std::size_t j = 1; j < p.size(); ++j) {
            const cdouble d = static_cast<double>(j) * p[j];
            next[j - 1] -= d;
            next[j + 1] += d;
        }
        p = std::move(next);
    }
    return p;
}

std::pair<cdouble, cdouble> horner(const std::vector<cdouble>& c, double t) {
    cdouble v = 0.0, dv = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) {
        dv = dv * t + v;
        v = v * t + c[j];
    }
    return {v, dv};
}

class PoschlTellerInterior final : public detail::InteriorSolution {
public:
    PoschlTellerInterior(int level, double k) : k_(k), poly_(pt_polynomial(level, k)) {
        norm_ = 1.0 / horner(poly_, -1.0).first;
    }
    cdouble transmission() const { return horner(poly_, 1.0).first * norm_; }
    std::pair<cdouble, cdouble> eval(double x) const override {
        const double t = std::tanh(x);
        const auto [p, dp] = horner(poly_, t);
        const cdouble e = expi(k_ * x) * norm_;
        return {e * p, e * (kI * k_ * p + (1.0 - t * t) * dp)};
    }

private:
    double k_;
    std::vector<cdouble> poly_;
    cdouble norm_;
};

// psi = a e^{ikx} + b e^{-ikx}, psi' = ik (a e^{ikx} - b e^{-ikx}):
//   a' =  (m V / ik) (a + b e^{-2ikx}),  b' = -(m V / ik) (a e^{2ikx} + b).
struct Amplitudes {
    cdouble a;
    cdouble b;
};

class NumericInterior final : public detail::InteriorSolution {
public:
    NumericInterior(const Potential& v, double k, double mass)
        : v_(v), k_(k), mass_(mass), vmax_(v.max_abs()) {
        const double l = v.support_radius();
        knots_.push_back(-l);
        for (double b : v.breakpoints()) {
            if (b > -l && b < l) knots_.push_back(b);
        }
        knots_.push_back(l);
        std::sort(knots_.begin(), knots_.end());
        knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
    }

    void integrate() {
        Amplitudes c{1.0, 0.0};
        std::size_t steps = 0;
        xs_.push_back(knots_.back());
        cs_.push_back(c);
        double last = knots_.back();
        for (std::size_t seg = knots_.size() - 1; seg-- > 0;) {
            const double lo = knots_[seg];
            const double hi = knots_[seg + 1];
            double x = hi;
            while (x > lo) {
                const double h = std::min(step(x, lo, hi), x - lo);
                double xn = x - h;
                if (xn - lo <= 1e-9 * h) xn = lo;
                c = rk4(c, x, xn, lo, hi);
                x = xn;
                if (++steps > kMaxSteps) {
                    throw StepResolutionError("scattering integration needs more than " +
                                              std::to_string(kMaxSteps) + " RK4 steps");
                }
                if (last - x >= spacing(x) || x == lo) {
                    xs_.push_back(x);
                    cs_.push_back(c);
                    last = x;
                }
            }
        }
        // Stored in descending x; flip for lookups and normalize so a(-L) = 1.
        std::reverse(xs_.begin(), xs_.end());
        std::reverse(cs_.begin(), cs_.end());
        const cdouble a_left = cs_.front().a;
        for (auto& s : cs_) {
            s.a /= a_left;
            s.b /= a_left;
        }
        t_ = 1.0 / a_left;
        r_ = cs_.front().b;
    }

    cdouble transmission() const { return t_; }
    cdouble reflection() const { return r_; }

    std::pair<cdouble, cdouble> eval(double x) const override {
        // Start from the nearest stored point at or above x and march down.
        auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
        if (it == xs_.end()) --it;
        const auto idx = static_cast<std::size_t>(it - xs_.begin());
        Amplitudes c = cs_[idx];
        double pos = xs_[idx];
        if (pos != x) {
            auto k = std::upper_bound(knots_.begin(), knots_.end(), x);
            const double hi = k == knots_.end() ? knots_.back() : *k;
            const double lo = k == knots_.begin() ? knots_.front() : *(k - 1);
            while (pos > x) {
                const double h = std::min(step(pos, lo, hi), pos - x);
                const double xn = pos - h <= x ? x : pos - h;
                c = rk4(c, pos, xn, lo, hi);
                pos = xn;
            }
        }
        const cdouble e = expi(k_ * x);
        const cdouble ep = c.a * e;
        const cdouble em = c.b * std::conj(e);
        return {ep + em, kI * k_ * (ep - em)};
    }

private:
    static constexpr std::size_t kMaxSteps = std::size_t{1} << 26;

    // V inside the open segment (lo, hi): the square well jumps at its edges.
    double pot(double x, double lo, double hi) const {
        if (x <= lo) x = std::nextafter(lo, hi);
        if (x >= hi) x = std::nextafter(hi, lo);
        return v_(x);
    }

    double spacing(double x) const { return 0.05 * (1.0 + std::abs(x) / 16.0); }

    double step(double x, double lo, double hi) const {
        const double vloc = std::abs(pot(x, lo, hi));
        const double coupling = mass_ * vloc / k_;
        double h = 0.025;
        if (coupling > 0.0) h = std::min(h, 0.01 / coupling);
        // Where V is negligible against its peak the amplitudes are nearly
        // constant and only the e^{2ikx} factor needs resolving.
        const bool tail = vloc <= 1e-4 * vmax_;
        h = std::min(h, tail ? 0.25 / k_ : 0.025 / k_);
        if (tail) h = std::max(h, std::min(0.25 / k_, 0.01 * (1.0 + std::abs(x))));
        return h;
    }

    Amplitudes deriv(const Amplitudes& c, double x, double lo, double hi) const {
        const cdouble g = mass_ * pot(x, lo, hi) / (kI * k_);
        const cdouble e2 = expi(2.0 * k_ * x);
        return {g * (c.a + c.b * std::conj(e2)), -g * (c.a * e2 + c.b)};
    }

    Amplitudes rk4(const Amplitudes& c, double x, double xn, double lo, double hi) const {
        const double h = xn - x;
        const double xm = x + 0.5 * h;
        const auto k1 = deriv(c, x, lo, hi);
        const auto k2 = deriv({c.a + 0.5 * h * k1.a, c.b + 0.5 * h * k1.b}, xm, lo, hi);
        const auto k3 = deriv({c.a + 0.5 * h * k2.a, c.b + 0.5 * h * k2.b}, xm, lo, hi);
        const auto k4 = deriv({c.a + h * k3.a, c.b + h * k3.b}, xn, lo, hi);
        return {c.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                c.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b)};
    }

    Potential v_;
    double k_;
    double mass_;
    double vmax_;
    std::vector<double> knots_;
    std::vector<double> xs_;
    std::vector<Amplitudes> cs_;
    cdouble t_ = 1.0;
    cdouble r_ = 0.0;
};

ScatteringData free_state(double k, double mass) {
    return ScatteringData(k, mass, 1.0, 0.0, 0.0, true, std::make_shared<PlaneWave>(k, 1.0));
}

ScatteringData solve_delta(const DeltaPotential& d, double k, double mass) {
    const cdouble t = kI * k / (kI * k - mass * d.strength);
    return ScatteringData(k, mass, t, t - 1.0, 0.0, true, std::make_shared<PlaneWave>(k, t));
}

ScatteringData solve_well(const SquareWell& w, double k, double mass) {
    const double a = w.half_width;
    const cdouble q = std::sqrt(cdouble(k * k - 2.0 * mass * w.depth, 0.0));
    // Unit transmitted wave at x = a, carried to x = -a.
    const cdouble psi_a = expi(k * a);
    const cdouble dpsi_a = kI * k * psi_a;
    const WellInterior unit(q, a, psi_a, dpsi_a);
    const auto [psi_l, dpsi_l] = unit.eval(-a);
    const cdouble big_a = 0.5 * (psi_l + dpsi_l / (kI * k)) * expi(k * a);
    const cdouble big_b = 0.5 * (psi_l - dpsi_l / (kI * k)) * expi(-k * a);
    const cdouble t = 1.0 / big_a;
    const cdouble r = big_b / big_a;
    return ScatteringData(k, mass, t, r, a, true,
                          std::make_shared<WellInterior>(q, a, t * psi_a, t * dpsi_a));
}

}  // namespace

ScatteringData::ScatteringData(double k, double mass, cdouble t, cdouble r, double support_radius,
                               bool analytic,
                               std::shared_ptr<const detail::InteriorSolution> interior)
    : k_(k), mass_(mass), t_(t), r_(r), l_(support_radius), analytic_(analytic),
      interior_(std::move(interior)) {}

double ScatteringData::unitarity_residual() const {
    return std::abs(std::norm(t_) + std::norm(r_) - 1.0);
}

std::pair<cdouble, cdouble> ScatteringData::eval(double x) const {
    if (x > l_) {
        const cdouble e = t_ * expi(k_ * x);
        return {e, kI * k_ * e};
    }
    if (x < -l_ || (l_ == 0.0 && x < 0.0)) {
        const cdouble ep = expi(k_ * x);
        const cdouble em = r_ * std::conj(ep);
        return {ep + em, kI * k_ * (ep - em)};
    }
    return interior_->eval(x);
}

ScatteringData solve_scattering(const Potential& v, double k, double mass,
                                ScatteringMethod method) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw NonpositiveWavenumber("wavenumber must be positive, got " + format_double(k));
    }
    Conventions conv(mass);
    if (const auto* d = v.as<DeltaPotential>()) {
        if (method == ScatteringMethod::Numeric) {
            throw InvalidArgument("the delta potential is only solved by matching conditions");
        }
        return solve_delta(*d, k, conv.mass());
    }
    if (v.is_zero()) return free_state(k, conv.mass());
    if (method == ScatteringMethod::Auto) {
        if (const auto* w = v.as<SquareWell>()) return solve_well(*w, k, conv.mass());
        if (const auto* p = v.as<PoschlTeller>(); p && p->mass == conv.mass()) {
            auto interior = std::make_shared<PoschlTellerInterior>(p->level, k);
            const cdouble t = interior->transmission();
            return ScatteringData(k, conv.mass(), t, 0.0, v.support_radius(), true,
                                  std::move(interior));
        }
    }
    auto interior = std::make_shared<NumericInterior>(v, k, conv.mass());
    interior->integrate();
    const cdouble t = interior->transmission();
    const cdouble r = interior->reflection();
    return ScatteringData(k, conv.mass(), t, r, v.support_radius(), false, std::move(interior));
}

cdouble eval_scattering_state(const ScatteringData& s, double x) { return s.value(x); }

std::vector<double> log_spaced(double k_min, double k_max, std::size_t n) {
    if (!(k_min > 0.0) || !(k_max >= k_min) || n == 0) {
        throw InvalidArgument("log_spaced needs 0 < k_min <= k_max and n >= 1");
    }
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = k_min;
        return out;
    }
    const double lo = std::log(k_min), hi = std::log(k_max);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = k_min;
    out.back() = k_max;
    return out;
}

std::vector<ScatteringData> transmission_sweep(const Potential& v, std::span<const double> ks,
                                               double mass, ScatteringMethod method) {
    std::vector<std::shared_ptr<ScatteringData>> tmp(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        tmp[i] = std::make_shared<ScatteringData>(solve_scattering(v, ks[i], mass, method));
    });
    std::vector<ScatteringData> out;
    out.reserve(ks.size());
    for (auto& p : tmp) out.push_back(*p);
    return out;
}

std::string transmission_csv(std::span<const ScatteringData> rows) {
    std::string out = "k,re_T,im_T,re_R,im_R,abs_T2,abs_R2,unitarity_residual\n";
    for (const auto& s : rows) {
        const double fields[] = {s.k(),         s.T().real(),         s.T().imag(),
                                 s.R().real(),  s.R().imag(),         std::norm(s.T()),
                                 std::norm(s.R()), s.unitarity_residual()};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += format_double(fields[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace backflow
