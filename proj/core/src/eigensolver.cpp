#include "backflow/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "backflow/errors.hpp"
#include "backflow/numeric_format.hpp"

namespace backflow {

namespace {

void check_hermitian(const ComplexMatrix& a) {
    if (!a.square()) throw InvalidArgument("eigensolver needs a square matrix");
    if (a.rows() == 0) throw InvalidArgument("eigensolver needs a nonempty matrix");
    const double defect = a.hermitian_defect();
    const double scale = a.frobenius_norm();
    if (!std::isfinite(scale) || defect > 1e-10 * scale) {
        throw NotHermitian("matrix is not Hermitian: defect " + format_double(defect) +
                           " vs norm " + format_double(scale));
    }
}

// Reduces the Hermitian h (lower triangle used) in place. On return d/e hold
// the tridiagonal (e[i] = T(i+1, i)), and qt holds Q^T so that A = Q T Q^H.
void tridiagonalize(ComplexMatrix& h, std::vector<double>& d, std::vector<cdouble>& e,
                    ComplexMatrix& qt) {
    const std::size_t n = h.rows();
    d.assign(n, 0.0);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    qt = ComplexMatrix::identity(n);
    std::vector<cdouble> v(n), p(n), w(n), s(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        cdouble* x = v.data();
        double xnorm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] = h(k + 1 + i, k);
            xnorm = std::hypot(xnorm, std::abs(x[i]));
        }
        const double tail = xnorm == 0.0 ? 0.0 : std::sqrt(std::max(0.0, xnorm * xnorm - std::norm(x[0])));
        if (tail <= 1e-300 * std::max(1.0, xnorm)) {
            e[k] = h(k + 1, k);
            continue;
        }
        const cdouble phase = std::abs(x[0]) > 0.0 ? x[0] / std::abs(x[0]) : cdouble(1.0);
        const cdouble alpha = -phase * xnorm;
        x[0] -= alpha;
        const double vnorm = norm2(std::span<const cdouble>(x, m));
        for (std::size_t i = 0; i < m; ++i) x[i] /= vnorm;

        // p = B v on the trailing block B = h[k+1.., k+1..]
        for (std::size_t i = 0; i < m; ++i) {
            cdouble acc = 0.0;
            const auto row = h.row(k + 1 + i);
            for (std::size_t j = 0; j < m; ++j) acc += row[k + 1 + j] * x[j];
            p[i] = acc;
        }
        cdouble kappa = 0.0;
        for (std::size_t i = 0; i < m; ++i) kappa += std::conj(x[i]) * p[i];
        for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kappa.real() * x[i];
        // B <- B - 2 v w^H - 2 w v^H
        for (std::size_t i = 0; i < m; ++i) {
            auto row = h.row(k + 1 + i);
            const cdouble vi = 2.0 * x[i];
            const cdouble wi = 2.0 * w[i];
            for (std::size_t j = 0; j < m; ++j) {
                row[k + 1 + j] -= vi * std::conj(w[j]) + wi * std::conj(x[j]);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            h(k + 1 + i, k) = 0.0;
            h(k, k + 1 + i) = 0.0;
        }
        h(k + 1, k) = alpha;
        h(k, k + 1) = std::conj(alpha);
        e[k] = alpha;

        // Q <- Q H, stored transposed: rows k+1.. of qt mix.
        std::fill(s.begin(), s.end(), cdouble(0.0));
        for (std::size_t j = 0; j < m; ++j) {
            const auto row = qt.row(k + 1 + j);
            for (std::size_t r = 0; r < n; ++r) s[r] += row[r] * x[j];
        }
        for (std::size_t j = 0; j < m; ++j) {
            auto row = qt.row(k + 1 + j);
            const cdouble c = 2.0 * std::conj(x[j]);
            for (std::size_t r = 0; r < n; ++r) row[r] -= s[r] * c;
        }
    }
    if (n >= 2) e[n - 2] = h(n - 1, n - 2);
    for (std::size_t i = 0; i < n; ++i) d[i] = h(i, i).real();
}

// Implicit QL on the real symmetric tridiagonal (d, off), rotating the rows
// of zt. Adapted from the classic tqli formulation.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& off, ComplexMatrix& zt) {
    const std::size_t n = d.size();
    if (n == 1) return;
    off.push_back(0.0);
    std::size_t iterations = 0;
    const std::size_t cap = 30 * n;
    for (std::size_t l = 0; l < n; ++l) {
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (++iterations > cap) {
                throw NoConvergence("tridiagonal QL exceeded " + std::to_string(cap) + " iterations");
            }
            double g = (d[l + 1] - d[l]) / (2.0 * off[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + off[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            std::size_t i = m;
            while (i-- > l) {
                const double f = s * off[i];
                const double b = c * off[i];
                r = std::hypot(f, g);
                off[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                auto zi = zt.row(i);
                auto zi1 = zt.row(i + 1);
                for (std::size_t k = 0; k < n; ++k) {
                    const cdouble t = zi1[k];
                    zi1[k] = s * zi[k] + c * t;
                    zi[k] = c * zi[k] - s * t;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    off.pop_back();
}

}  // namespace

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& a) {
    check_hermitian(a);
    const std::size_t n = a.rows();

    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const cdouble v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
        h(i, i) = h(i, i).real();
    }

    std::vector<double> d;
    std::vector<cdouble> e;
    ComplexMatrix zt;
    tridiagonalize(h, d, e, zt);

    // T = D T' D^H with T' real: delta_{i+1} = delta_i e_i / |e_i|.
    std::vector<double> off(e.size());
    cdouble delta = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mag = std::abs(e[i]);
        off[i] = mag;
        if (mag > 0.0) delta *= e[i] / mag;
        auto row = zt.row(i + 1);
        for (auto& z : row) z *= delta;
    }

    tridiagonal_ql(d, off, zt);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    HermitianEigensystem out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        const auto row = zt.row(order[j]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = row[r];
    }
    return out;
}

void fix_phase(std::vector<cdouble>& v) {
    double peak = 0.0;
    for (const auto& z : v) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return;
    for (const auto& z : v) {
        if (std::abs(z) > 1e-12 * peak) {
            const cdouble phase = std::conj(z) / std::abs(z);
            for (auto& y : v) y *= phase;
            return;
        }
    }
}

Eigenpair lowest_eigenpair(const ComplexMatrix& a) {
    const auto sys = hermitian_eigensystem(a);
    const std::size_t n = a.rows();
    const double scale = a.frobenius_norm();
    const double lowest = sys.values.front();
    const double tie = 1e-12 * std::max(scale, std::numeric_limits<double>::min());

    std::vector<cdouble> best;
    for (std::size_t j = 0; j < n && sys.values[j] - lowest <= tie; ++j) {
        std::vector<cdouble> v(n);
        for (std::size_t r = 0; r < n; ++r) v[r] = sys.vectors(r, j);
        const double nv = norm2(v);
        for (auto& z : v) z /= nv;
        fix_phase(v);
        const bool better =
            best.empty() ||
            std::lexicographical_compare(best.begin(), best.end(), v.begin(), v.end(),
                                         [](const cdouble& x, const cdouble& y) {
                                             return x.real() < y.real();
                                         });
        if (better) best = std::move(v);
    }

    Eigenpair out;
    out.value = lowest;
    auto av = a.multiply(best);
    for (std::size_t r = 0; r < n; ++r) av[r] -= lowest * best[r];
    out.residual = norm2(av);
    out.vector = std::move(best);
    if (!(out.residual <= 1e-9 * scale)) {
        throw NoConvergence("eigenpair residual " + format_double(out.residual) +
                            " exceeds tolerance");
    }
    return out;
}

}  // namespace backflow
