#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "backflow/backflow.hpp"

namespace backflow::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class OutputDir {
public:
    explicit OutputDir(const RunConfig& c) : dir_(c.output), config_(serialize(c)) {
        fs::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& contents) const {
        write_text_file(dir_ / name, contents);
        ordered_json meta;
        meta["tool"] = "backflow";
        meta["version"] = kVersion;
        meta["file"] = name;
        meta["config"] = ordered_json::parse(config_);
        write_text_file(dir_ / (name + ".meta.json"), meta.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string config_;
};

std::shared_ptr<const MomentumGrid> grid_of(const RunConfig& c) {
    return std::make_shared<const MomentumGrid>(make_gauss_grid(c.p_max, c.nodes));
}

ScatteringMethod method_of(const RunConfig& c) {
    return c.method == "numeric" ? ScatteringMethod::Numeric : ScatteringMethod::Auto;
}

Potential potential_of(const RunConfig& c) {
    if (c.potential.empty()) throw InvalidArgument("this command needs --potential");
    return Potential::parse(c.potential, c.mass);
}

void write_spectrum(const OutputDir& out, const RunConfig& c, const FluxFormMatrix& a,
                    const SpectrumResult& s) {
    out.write("spectrum.json", spectrum_json(s, a));
    out.write("eigvec.csv", wavefunction_csv(s.eigenvector));
    if (c.dump_matrix) {
        out.write("matrix.csv", matrix_csv(a));
        out.write("matrix.json", matrix_metadata_json(a));
    }
}

int cmd_free(const RunConfig& c, std::ostream& os) {
    const auto f = SmearingFunction::parse(c.smearing);
    const auto a = build_flux_matrix(grid_of(c), f, c.mass);
    const auto s = lowest_eigenpair(a);
    OutputDir out(c);
    write_spectrum(out, c, a, s);
    os << format_double(s.lambda_min) << '\n';
    return kOk;
}

int cmd_scatter(const RunConfig& c, std::ostream& os) {
    const auto f = SmearingFunction::parse(c.smearing);
    const auto v = potential_of(c);
    admissibility(v);
    const auto grid = grid_of(c);
    const auto a = build_dressed_flux_matrix(grid, f, v, c.mass, method_of(c));
    const auto s = lowest_eigenpair(a);
    const auto rows = transmission_sweep(v, grid->nodes(), c.mass, method_of(c));
    OutputDir out(c);
    write_spectrum(out, c, a, s);
    out.write("unitarity.csv", transmission_csv(rows));
    os << format_double(s.lambda_min) << '\n';
    return kOk;
}

int cmd_transmission(const RunConfig& c, std::ostream& os) {
    const auto v = potential_of(c);
    const auto ks = log_spaced(c.k_min, c.k_max, c.n_k);
    const auto rows = transmission_sweep(v, ks, c.mass, method_of(c));
    OutputDir out(c);
    out.write("transmission.csv", transmission_csv(rows));
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.unitarity_residual());
    os << format_double(worst) << '\n';
    return kOk;
}

std::string classical_csv(const ClassicalReport& r) {
    std::string s = "t,P_right\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        s += format_double(r.times[i]) + "," + format_double(r.p_right[i]) + "\n";
    }
    return s;
}

EvolutionConfig evolution_of(const RunConfig& c) {
    EvolutionConfig e;
    e.grid = PositionGrid(c.x_min, c.x_max, c.n_points);
    e.dt = c.dt;
    e.t_max = c.t_max;
    e.mass = c.mass;
    e.sample_every = c.sample_every;
    if (!c.potential.empty()) e.potential = potential_of(c);
    e.validate();
    return e;
}

int cmd_evolve_minimizer(const RunConfig& c, const EvolutionConfig& e, std::ostream& os) {
    const auto f = SmearingFunction::parse(c.smearing);
    const auto a = build_flux_matrix(grid_of(c), f, c.mass);
    const auto s = lowest_eigenpair(a);
    const auto r = backflow_demonstration(s.eigenvector, a, e);

    std::vector<double> times = r.series.times;
    const auto cl = classical_flux_baseline(c.particles, uniform_law(-1.0, 1.0),
                                            momentum_law(s.eigenvector), times, c.seed, c.mass);
    ordered_json j;
    j["lambda_min"] = s.lambda_min;
    j["jf0_position"] = r.jf0_position;
    j["relative_mismatch"] = r.relative_mismatch;
    j["sign_agreement"] = r.sign_agreement;
    j["backflow"] = r.backflow;
    j["initial_norm"] = r.initial_norm;
    j["negative_flux_samples"] = r.negative_flux_samples;
    j["p_right_agreement"] = r.p_right_agreement;
    j["p_f_agreement"] = r.p_f_agreement;
    j["classical_violations"] = cl.violations;
    OutputDir out(c);
    out.write("diagnostics.csv", diagnostics_csv(r.series));
    out.write("classical.csv", classical_csv(cl));
    out.write("backflow.json", j.dump(2) + "\n");
    os << format_double(r.jf0_position) << '\n';
    return kOk;
}

int cmd_evolve(const RunConfig& c, std::ostream& os) {
    const auto e = evolution_of(c);
    if (c.packet == "minimizer") return cmd_evolve_minimizer(c, e, os);

    const auto psi0 = gaussian_packet(e.grid, c.x0, c.p0, c.sigma);
    std::optional<SmearingFunction> f;
    if (!c.smearing.empty()) f = SmearingFunction::parse(c.smearing);
    DiagnosticsRecorder rec(e.grid, c.mass, f);
    OutputDir out(c);
    std::size_t sample = 0;
    split_step_evolve(psi0, e, [&](double t, std::span<const cdouble> psi) {
        rec.record(t, psi);
        if (c.snapshot_every > 0 && sample % c.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%06zu.csv", sample);
            out.write(name, snapshot_csv(e.grid, psi));
        }
        ++sample;
    });
    const auto d = rec.finish();
    out.write("diagnostics.csv", diagnostics_csv(d));
    os << format_double(d.max_residual()) << '\n';
    return kOk;
}

int cmd_scan(const RunConfig& c, std::ostream& os, std::ostream& log) {
    const auto f = SmearingFunction::parse(c.smearing);
    MatrixBuilder builder;
    if (c.potential.empty()) {
        builder = [&](std::shared_ptr<const MomentumGrid> g) { return build_flux_matrix(std::move(g), f, c.mass); };
    } else {
        const auto v = potential_of(c);
        admissibility(v);
        builder = [&, v](std::shared_ptr<const MomentumGrid> g) {
            return build_dressed_flux_matrix(std::move(g), f, v, c.mass, method_of(c));
        };
    }
    const auto report = convergence_scan(builder, c.scan_nodes, c.scan_p_max, c.tolerance,
                                         [&](const ConvergenceRung& r) {
                                             log << "rung n=" << r.n << " p_max=" << format_double(r.p_max)
                                                 << " lambda_min=" << format_double(r.lambda_min) << '\n';
                                         });
    OutputDir out(c);
    out.write("convergence.json", convergence_json(report));
    os << format_double(report.ladder.back().lambda_min) << ' '
       << (report.converged ? "converged" : "not-converged") << '\n';
    return kOk;
}

int cmd_admissible(const RunConfig& c, std::ostream& os) {
    os << format_double(admissibility(potential_of(c))) << '\n';
    return kOk;
}

}  // namespace

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.command == "free") return cmd_free(c, out);
        if (c.command == "scatter") return cmd_scatter(c, out);
        if (c.command == "transmission") return cmd_transmission(c, out);
        if (c.command == "evolve") return cmd_evolve(c, out);
        if (c.command == "scan") return cmd_scan(c, out, err);
        if (c.command == "admissible") return cmd_admissible(c, out);
        err << "error: unknown command '" << c.command << "'\n";
        return kConfigError;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::InvalidArgument:
            case ErrorKind::PreconditionViolation:
            case ErrorKind::NonpositiveWavenumber: return kConfigError;
            case ErrorKind::InadmissiblePotential: return kInadmissible;
            default: return kNumericalFailure;
        }
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

namespace {

std::string list_json(const std::string& text, bool integers) {
    ordered_json arr = ordered_json::array();
    for (const auto& part : [&] {
             std::vector<std::string> v;
             std::string cur;
             for (char ch : text) {
                 if (ch == ',') {
                     v.push_back(cur);
                     cur.clear();
                 } else {
                     cur += ch;
                 }
             }
             v.push_back(cur);
             return v;
         }()) {
        std::size_t used = 0;
        if (integers) {
            if (part.find('-') != std::string::npos) throw InvalidArgument("negative integer: " + text);
            const auto n = std::stoull(part, &used);
            if (used != part.size()) throw InvalidArgument("bad integer list: " + text);
            arr.push_back(n);
        } else {
            const double x = std::stod(part, &used);
            if (used != part.size()) throw InvalidArgument("bad number list: " + text);
            arr.push_back(x);
        }
    }
    return arr.dump();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical quantum backflow: flux-form spectra, scattering and evolution", "backflow"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    app.add_option("--config", config_path, "JSON config merged under the flags");

    // Every flag writes its raw text here; only flags actually given override the config.
    struct Flag {
        std::string key;
        enum Kind { Text, Number, Integer, NumberList, IntegerList, Boolean } kind;
        std::string value;
        CLI::Option* opt = nullptr;
    };
    std::vector<std::unique_ptr<Flag>> flags;
    auto add = [&](const std::string& name, const std::string& key, Flag::Kind kind, const std::string& help) {
        flags.push_back(std::make_unique<Flag>(Flag{key, kind, {}, nullptr}));
        auto* fl = flags.back().get();
        if (kind == Flag::Boolean) {
            fl->opt = app.add_flag(name, help);
        } else {
            fl->opt = app.add_option(name, fl->value, help);
        }
    };
    add("--smearing", "smearing", Flag::Text, "gaussian:c,w[,a] terms joined by '+'");
    add("--potential", "potential", Flag::Text, "delta:g | well:V0,a | pt:l | powerlaw:s,alpha | file:path");
    add("--mass", "mass", Flag::Number, "particle mass");
    add("--pmax", "p_max", Flag::Number, "momentum cutoff of the grid");
    add("--nodes", "nodes", Flag::Integer, "Gauss-Legendre nodes");
    add("--scan-nodes", "scan_nodes", Flag::IntegerList, "comma-separated n ladder");
    add("--scan-pmax", "scan_p_max", Flag::NumberList, "comma-separated p_max ladder");
    add("--tol", "tolerance", Flag::Number, "relative convergence tolerance");
    add("--dump-matrix", "dump_matrix", Flag::Boolean, "also write matrix.csv/json");
    add("--kmin", "k_min", Flag::Number, "smallest wavenumber");
    add("--kmax", "k_max", Flag::Number, "largest wavenumber");
    add("--nk", "n_k", Flag::Integer, "number of log-spaced wavenumbers");
    add("--method", "method", Flag::Text, "auto | numeric");
    add("--xmin", "x_min", Flag::Number, "left box edge");
    add("--xmax", "x_max", Flag::Number, "right box edge");
    add("--npoints", "n_points", Flag::Integer, "grid points (power of two)");
    add("--dt", "dt", Flag::Number, "time step");
    add("--tmax", "t_max", Flag::Number, "final time");
    add("--sample-every", "sample_every", Flag::Integer, "steps between samples");
    add("--packet", "packet", Flag::Text, "gaussian | minimizer");
    add("--x0", "x0", Flag::Number, "packet centre");
    add("--p0", "p0", Flag::Number, "packet mean momentum");
    add("--sigma", "sigma", Flag::Number, "packet width");
    add("--snapshot-every", "snapshot_every", Flag::Integer, "write every m-th sample (0: none)");
    add("--particles", "particles", Flag::Integer, "classical ensemble size");
    add("--out,-o", "output", Flag::Text, "output directory");
    add("--seed", "seed", Flag::Integer, "random seed");

    for (const auto& name : kCommands) app.add_subcommand(name, "run the " + name + " command");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = merge_config(config, read_text_file(config_path));
        ordered_json patch = ordered_json::object();
        patch["command"] = app.get_subcommands().front()->get_name();
        for (const auto& f : flags) {
            if (f->opt->count() == 0) continue;
            switch (f->kind) {
                case Flag::Text: patch[f->key] = f->value; break;
                case Flag::Number: patch[f->key] = ordered_json::parse(list_json(f->value, false))[0]; break;
                case Flag::Integer: patch[f->key] = ordered_json::parse(list_json(f->value, true))[0]; break;
                case Flag::NumberList: patch[f->key] = ordered_json::parse(list_json(f->value, false)); break;
                case Flag::IntegerList: patch[f->key] = ordered_json::parse(list_json(f->value, true)); break;
                case Flag::Boolean: patch[f->key] = true; break;
            }
        }
        config = merge_config(config, patch.dump());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return run_command(config, out, err);
}

}  // namespace backflow::cli
