#include "backflow/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "backflow/conventions.hpp"
#include "backflow/errors.hpp"

namespace backflow {

QuadratureRule gauss_legendre(std::size_t n) {
    if (n < 1) throw InvalidArgument("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root, then Newton on P_n.
        const double theta = kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5);
        double x = std::cos(theta) * (1.0 - (dn - 1.0) / (8.0 * dn * dn * dn));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double dk = static_cast<double>(k);
            const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) {
            p0 = 1.0;
            dp = 1.0;
        } else {
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = a + half * (rule.nodes[i] + 1.0);
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, double max_panel_width,
                                        std::size_t points_per_panel,
                                        std::span<const double> breakpoints) {
    if (!(b > a)) throw InvalidArgument("composite_gauss_legendre: need a < b");
    if (!(max_panel_width > 0.0)) throw InvalidArgument("composite_gauss_legendre: panel width");
    std::vector<double> edges{a, b};
    for (double x : breakpoints) {
        if (x > a && x < b) edges.push_back(x);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const QuadratureRule base = gauss_legendre(points_per_panel);
    QuadratureRule out;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        const auto panels =
            static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / max_panel_width)));
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double pa = lo + width * static_cast<double>(p);
            const double pb = (p + 1 == panels) ? hi : pa + width;
            const double half = 0.5 * (pb - pa);
            for (std::size_t i = 0; i < base.nodes.size(); ++i) {
                out.nodes.push_back(pa + half * (base.nodes[i] + 1.0));
                out.weights.push_back(base.weights[i] * half);
            }
        }
    }
    return out;
}

}  // namespace backflow
