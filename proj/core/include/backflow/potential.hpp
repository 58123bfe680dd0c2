#pragma once

#include <string>
#include <variant>
#include <vector>

namespace backflow {

/// V(x) = strength * delta(x)
struct DeltaPotential {
    double strength = 0.0;
};

/// V(x) = depth for |x| < half_width (depth < 0 is attractive).
struct SquareWell {
    double depth = 0.0;
    double half_width = 1.0;
};

/// V(x) = -level (level + 1) / (2 mass) sech^2 x, reflectionless for integer level.
struct PoschlTeller {
    int level = 1;
    double mass = 1.0;
};

/// V(x) = scale (1 + |x|)^{-alpha}, set to zero beyond `cutoff` (where |V| < 1e-12).
struct PowerLaw {
    double scale = 1.0;
    double alpha = 3.0;
    double cutoff = 0.0;
};

/// Piecewise-linear interpolation of samples, zero outside [x.front(), x.back()].
struct SampledPotential {
    std::vector<double> x;
    std::vector<double> v;
    std::string source;
};

class Potential {
public:
    using Variant = std::variant<DeltaPotential, SquareWell, PoschlTeller, PowerLaw, SampledPotential>;

    static Potential delta(double strength);
    static Potential square_well(double depth, double half_width);
    static Potential poschl_teller(int level, double mass = 1.0);
    static Potential power_law(double scale, double alpha);
    static Potential sampled(std::vector<double> x, std::vector<double> v, std::string source = {});

    /// `delta:g`, `well:V0,a`, `pt:l`, `powerlaw:s,alpha`, `file:path` (CSV `x,V`).
    /// The mass is only used by the Poschl-Teller variant. Throws InvalidArgument.
    static Potential parse(const std::string& spec, double mass = 1.0);
    std::string to_spec() const;

    const Variant& variant() const noexcept { return v_; }
    template <typename T>
    const T* as() const noexcept { return std::get_if<T>(&v_); }
    bool is_delta() const noexcept { return std::holds_alternative<DeltaPotential>(v_); }
    /// True when the potential vanishes identically.
    bool is_zero() const;

    /// Pointwise value; the square well takes the mean value at x = +-a.
    /// Throws PreconditionViolation for the delta variant.
    double operator()(double x) const;

    /// L such that |V(x)| < 1e-12 for |x| > L.
    double support_radius() const;
    /// sup |V| (|strength| for the delta).
    double max_abs() const;
    /// Points where V or its derivative is not smooth, inside [-L, L].
    std::vector<double> breakpoints() const;

private:
    explicit Potential(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// \int (1 + |x|) |V(x)| dx. Closed forms for all variants except sampled
/// data, where the window is doubled twice from a quarter of its extent and
/// the potential is rejected when the tail contribution shrinks by less than
/// a factor 1.5 per doubling. Samples that vanish at both ends are compactly
/// supported and skip that test. Throws InadmissiblePotential.
double admissibility(const Potential& v);

/// Weighted integral restricted to [-r, r] for sampled data, exact for the
/// piecewise-linear interpolant.
double sampled_weighted_norm(const SampledPotential& s, double r);

}  // namespace backflow
