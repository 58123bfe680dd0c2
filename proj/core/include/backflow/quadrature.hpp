#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace backflow {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Composite Gauss-Legendre on [a, b]. Panel edges always include every
/// breakpoint lying strictly inside (a, b); each resulting interval is split
/// into equal panels no wider than max_panel_width.
QuadratureRule composite_gauss_legendre(double a, double b, double max_panel_width,
                                        std::size_t points_per_panel,
                                        std::span<const double> breakpoints = {});

}  // namespace backflow
