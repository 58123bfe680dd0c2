#pragma once

// Units and transform conventions used throughout the library:
//   hbar = 1, mass m > 0 (default 1),
//   f^(k)  = \int dx f(x) e^{-ikx},
//   psi(x) = (2 pi)^{-1/2} \int dp phi(p) e^{ipx}.
// With these choices \int dx f(x) e^{i(q-p)x} = f^(p - q).

#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "backflow/matrix.hpp"

namespace backflow {

inline constexpr double kPi = 3.14159265358979323846;

class Conventions {
public:
    static constexpr double hbar = 1.0;

    explicit Conventions(double mass = 1.0);

    double mass() const noexcept { return mass_; }

private:
    double mass_;
};

/// Gauss-Legendre nodes on (0, p_max). Node positivity is the discrete form
/// of the positive-momentum projector.
class MomentumGrid {
public:
    double p_max() const noexcept { return p_max_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> sqrt_weights() const noexcept { return sqrt_weights_; }

    friend MomentumGrid make_gauss_grid(double p_max, std::size_t n);
    /// Grid read back from serialized nodes/weights; invariants are re-checked.
    static MomentumGrid from_nodes(double p_max, std::vector<double> nodes,
                                   std::vector<double> weights);

private:
    MomentumGrid(double p_max, std::vector<double> nodes, std::vector<double> weights);

    double p_max_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> sqrt_weights_;
};

/// Throws InvalidArgument for p_max <= 0 or n < 2.
MomentumGrid make_gauss_grid(double p_max, std::size_t n);

/// Sign of the physical momentum carried by the grid nodes. A wavefunction on
/// a MomentumGrid normally has support on p > 0; its time reverse lives on the
/// mirrored nodes p < 0.
enum class MomentumSupport { Positive, Negative };

class MomentumWavefunction {
public:
    MomentumWavefunction(std::shared_ptr<const MomentumGrid> grid,
                         std::vector<cdouble> amplitudes,
                         MomentumSupport support = MomentumSupport::Positive);

    /// Amplitudes from the eigenvector of a sqrt(w)-scaled form: phi_i = v_i / sqrt(w_i).
    static MomentumWavefunction from_scaled(std::shared_ptr<const MomentumGrid> grid,
                                            std::span<const cdouble> scaled);

    const MomentumGrid& grid() const noexcept { return *grid_; }
    std::shared_ptr<const MomentumGrid> grid_ptr() const noexcept { return grid_; }
    std::span<const cdouble> amplitudes() const noexcept { return amplitudes_; }
    MomentumSupport support() const noexcept { return support_; }

    /// sum_i w_i |phi_i|^2
    double norm_squared() const;
    bool normalized() const { return std::abs(norm_squared() - 1.0) <= 1e-10; }
    MomentumWavefunction normalized_copy() const;

    /// sqrt(w_i) phi_i, the coordinates in which flux forms are plain Hermitian matrices.
    std::vector<cdouble> scaled_amplitudes() const;

    /// phi(p) -> conj(phi(-p)): conjugated amplitudes on the mirrored nodes.
    MomentumWavefunction time_reversed() const;

    double physical_momentum(std::size_t i) const;

private:
    std::shared_ptr<const MomentumGrid> grid_;
    std::vector<cdouble> amplitudes_;
    MomentumSupport support_;
};

/// Nonnegative sum of Gaussians a_i exp(-(x - c_i)^2 / (2 w_i^2)).
class SmearingFunction {
public:
    struct Term {
        double amplitude = 1.0;
        double center = 0.0;
        double width = 1.0;
    };

    static SmearingFunction gaussian(double center, double width, double amplitude = 1.0);
    explicit SmearingFunction(std::vector<Term> terms);

    std::span<const Term> terms() const noexcept { return terms_; }

    double operator()(double x) const;
    /// \int_{-inf}^{x} f(y) dy
    double cumulative(double x) const;
    /// \int f = f^(0)
    double integral() const;
    /// Upper bound of f (sum of amplitudes).
    double peak_bound() const;
    std::complex<double> fourier(double k) const;

    /// [min(c_i - 10 w_i), max(c_i + 10 w_i)]: outside, f is below 2e-22 of its peak.
    double window_lo() const;
    double window_hi() const;

    /// f(x / lambda)
    SmearingFunction dilated(double lambda) const;

    /// "gaussian:c,w" terms joined by '+', optional third field for the amplitude.
    std::string to_spec() const;
    static SmearingFunction parse(const std::string& spec);

private:
    std::vector<Term> terms_;
};

std::complex<double> smearing_fourier(const SmearingFunction& f, double k);

/// Uniform periodic grid x_j = x_min + j dx, j < n, dx = (x_max - x_min) / n.
class PositionGrid {
public:
    PositionGrid(double x_min, double x_max, std::size_t n_points);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_); }
    double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx(); }
    /// Index of the grid point at x = 0 if there is one.
    std::ptrdiff_t origin_index() const noexcept;
    /// Largest representable |k| on the grid, pi / dx.
    double k_nyquist() const noexcept { return kPi / dx(); }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
};

/// psi(x_j) = (2 pi)^{-1/2} sum_i w_i phi_i e^{i p_i x_j}, by direct quadrature.
/// Throws ResolutionError if dx > pi / p_max.
std::vector<cdouble> momentum_to_position(const MomentumWavefunction& phi,
                                          const PositionGrid& grid);

/// sum_j dx |psi_j|^2
double position_norm_squared(std::span<const cdouble> psi, const PositionGrid& grid);

/// CSV with header `p,weight,re,im`. Physical momenta are written, so a
/// time-reversed wavefunction shows negative p.
std::string wavefunction_csv(const MomentumWavefunction& phi);
void write_wavefunction_csv(const std::filesystem::path& path, const MomentumWavefunction& phi);
/// p_max is recovered as the weight sum (Gauss weights integrate constants exactly).
MomentumWavefunction read_wavefunction_csv(const std::filesystem::path& path);
MomentumWavefunction parse_wavefunction_csv(const std::string& csv);

}  // namespace backflow
