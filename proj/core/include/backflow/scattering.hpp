#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "backflow/matrix.hpp"
#include "backflow/potential.hpp"

namespace backflow {

enum class ScatteringMethod { Auto, Numeric };

namespace detail {
/// Solution on [-L, L]; returns (psi, psi') with the left-incidence normalization.
class InteriorSolution {
public:
    virtual ~InteriorSolution() = default;
    virtual std::pair<cdouble, cdouble> eval(double x) const = 0;
};
}  // namespace detail

/// Left-incidence stationary state:
///   psi_k(x) = e^{ikx} + R e^{-ikx}   for x < -L,
///   psi_k(x) = T e^{ikx}              for x > L.
class ScatteringData {
public:
    ScatteringData(double k, double mass, cdouble t, cdouble r, double support_radius,
                   bool analytic, std::shared_ptr<const detail::InteriorSolution> interior);

    double k() const noexcept { return k_; }
    double mass() const noexcept { return mass_; }
    cdouble T() const noexcept { return t_; }
    cdouble R() const noexcept { return r_; }
    double support_radius() const noexcept { return l_; }
    bool analytic() const noexcept { return analytic_; }

    /// | |T|^2 + |R|^2 - 1 |
    double unitarity_residual() const;

    cdouble value(double x) const { return eval(x).first; }
    cdouble derivative(double x) const { return eval(x).second; }
    std::pair<cdouble, cdouble> eval(double x) const;

private:
    double k_;
    double mass_;
    cdouble t_;
    cdouble r_;
    double l_;
    bool analytic_;
    std::shared_ptr<const detail::InteriorSolution> interior_;
};

/// Closed forms for delta, square well and Poschl-Teller (when its mass matches
/// `mass`); RK4 on [-L, L] otherwise or when `method` is Numeric. The delta is
/// never integrated numerically (InvalidArgument). Throws NonpositiveWavenumber
/// for k <= 0 and StepResolutionError when the step rule needs more than
/// 2^26 steps.
ScatteringData solve_scattering(const Potential& v, double k, double mass = 1.0,
                                ScatteringMethod method = ScatteringMethod::Auto);

cdouble eval_scattering_state(const ScatteringData& s, double x);

/// n log-spaced points from k_min to k_max inclusive.
std::vector<double> log_spaced(double k_min, double k_max, std::size_t n);

std::vector<ScatteringData> transmission_sweep(const Potential& v, std::span<const double> ks,
                                               double mass = 1.0,
                                               ScatteringMethod method = ScatteringMethod::Auto);

/// Header `k,re_T,im_T,re_R,im_R,abs_T2,abs_R2,unitarity_residual`.
std::string transmission_csv(std::span<const ScatteringData> rows);

}  // namespace backflow
