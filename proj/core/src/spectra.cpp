#include "backflow/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "backflow/eigensolver.hpp"
#include "backflow/errors.hpp"

namespace backflow {

SpectrumResult lowest_eigenpair(const FluxFormMatrix& a) {
    auto pair = lowest_eigenpair(a.entries());
    auto phi = MomentumWavefunction::from_scaled(a.grid_ptr(), pair.vector);
    return SpectrumResult{pair.value, std::move(phi), pair.residual, a.grid().p_max(), a.size()};
}

std::string spectrum_json(const SpectrumResult& s, const FluxFormMatrix& a) {
    nlohmann::ordered_json j;
    j["lambda_min"] = s.lambda_min;
    j["residual"] = s.residual;
    j["grid"] = {{"p_max", s.p_max}, {"n_nodes", s.n_nodes}};
    j["kind"] = to_string(a.kind());
    j["smearing"] = a.smearing().to_spec();
    j["mass"] = a.mass();
    if (!a.potential_spec().empty()) j["potential"] = a.potential_spec();
    j["eigenvector_norm_squared"] = s.eigenvector.norm_squared();
    return j.dump(2) + "\n";
}

std::vector<double> ConvergenceReport::successive_differences() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        out.push_back(std::abs(ladder[i].lambda_min - ladder[i - 1].lambda_min));
    }
    return out;
}

ConvergenceReport make_convergence_report(std::vector<ConvergenceRung> ladder, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("convergence tolerance must be positive");
    ConvergenceReport r;
    r.ladder = std::move(ladder);
    if (r.ladder.size() < 2) {
        r.converged = false;
        r.final_rel_change = std::numeric_limits<double>::infinity();
        return r;
    }
    const double last = r.ladder.back().lambda_min;
    const double prev = r.ladder[r.ladder.size() - 2].lambda_min;
    const double diff = std::abs(last - prev);
    r.final_rel_change = diff / std::abs(last);
    r.converged = std::isfinite(last) && diff <= tol * std::abs(last);
    return r;
}

ConvergenceReport convergence_scan(const MatrixBuilder& builder,
                                   std::span<const std::size_t> n_list,
                                   std::span<const double> p_max_list, double tol,
                                   const RungLogger& log) {
    if (n_list.empty() || p_max_list.empty()) {
        throw InvalidArgument("convergence ladder needs at least one n and one p_max");
    }
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        !std::is_sorted(p_max_list.begin(), p_max_list.end())) {
        throw InvalidArgument("convergence ladder lists must be ascending");
    }
    if (!(tol > 0.0)) throw InvalidArgument("convergence tolerance must be positive");

    std::vector<ConvergenceRung> ladder;
    for (double p_max : p_max_list) {
        for (std::size_t n : n_list) {
            auto grid = std::make_shared<const MomentumGrid>(make_gauss_grid(p_max, n));
            const auto spectrum = lowest_eigenpair(builder(grid));
            ConvergenceRung rung{n, p_max, spectrum.lambda_min};
            if (log) log(rung);
            ladder.push_back(rung);
        }
    }
    return make_convergence_report(std::move(ladder), tol);
}

std::string convergence_json(const ConvergenceReport& r) {
    nlohmann::ordered_json j;
    j["ladder"] = nlohmann::ordered_json::array();
    for (const auto& rung : r.ladder) {
        j["ladder"].push_back({{"n", rung.n}, {"p_max", rung.p_max}, {"lambda_min", rung.lambda_min}});
    }
    j["converged"] = r.converged;
    if (std::isfinite(r.final_rel_change)) {
        j["final_rel_change"] = r.final_rel_change;
    } else {
        j["final_rel_change"] = nullptr;
    }
    return j.dump(2) + "\n";
}

}  // namespace backflow
