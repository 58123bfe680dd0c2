#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "backflow/backflow.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "json.hpp"

using namespace backflow;
using namespace backflow::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("BACKFLOW_TEST_TMP");
    const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "backflow_cli_test";
    const auto dir = root / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config round trip") {
    RunConfig c;
    CHECK(parse_config(serialize(c)) == c);
    c.command = "scan";
    c.potential = "well:-1,1";
    c.scan_nodes = {10, 20};
    c.scan_p_max = {4.5};
    c.dt = 1.25e-5;
    c.seed = 18446744073709551615ull;
    c.dump_matrix = true;
    const auto text = serialize(c);
    CHECK(parse_config(text) == c);
    CHECK(serialize(parse_config(text)) == text);
    CHECK(text.back() == '\n');
}

TEST_CASE("config parsing rejects bad input") {
    CHECK_THROWS_AS(parse_config("{"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[]"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"nodez": 3})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"nodes": "3"})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"nodes": -3})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"nodes": 2.5})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"mass": true})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"command": "dance"})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"method": "exact"})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"packet": "square"})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"scan_nodes": [1, "a"]})"), InvalidArgument);
}

TEST_CASE("partial configs merge over defaults") {
    const auto c = merge_config(RunConfig{}, R"({"nodes": 64, "potential": "delta:1"})");
    CHECK(c.nodes == 64);
    CHECK(c.potential == "delta:1");
    CHECK(c.p_max == 8.0);
    CHECK(parse_config(R"({"mass": 2})").mass == 2.0);
}

TEST_CASE("free command writes the spectrum") {
    const auto dir = scratch("free");
    const auto r = run({"free", "--smearing", "gaussian:0,1", "--pmax", "8", "--nodes", "200", "--out", dir.string()});
    REQUIRE(r.code == kOk);
    const double lambda = std::stod(r.out);
    CHECK(lambda < 0.0);
    const auto direct = lowest_eigenpair(build_flux_matrix(make_gauss_grid(8.0, 200), SmearingFunction::gaussian(0.0, 1.0)));
    CHECK(lambda == direct.lambda_min);
    for (const char* name : {"spectrum.json", "eigvec.csv", "spectrum.json.meta.json", "eigvec.csv.meta.json"}) {
        CHECK(fs::exists(dir / name));
    }
    CHECK_FALSE(fs::exists(dir / "matrix.csv"));
    const auto meta = nlohmann::json::parse(slurp(dir / "spectrum.json.meta.json"));
    CHECK(meta["tool"] == "backflow");
    CHECK(meta["version"] == kVersion);
    CHECK(meta["config"]["nodes"] == 200);
    CHECK(meta["config"]["command"] == "free");
    const auto spec = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    CHECK(spec["lambda_min"].get<double>() == lambda);
    const auto phi = read_wavefunction_csv(dir / "eigvec.csv");
    CHECK(phi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("repeated runs are byte-identical") {
    const auto a = scratch("repeat_a"), b = scratch("repeat_b");
    REQUIRE(run({"free", "--nodes", "64", "--dump-matrix", "-o", a.string()}).code == kOk);
    REQUIRE(run({"free", "--nodes", "64", "--dump-matrix", "-o", b.string()}).code == kOk);
    CHECK(fs::exists(a / "matrix.csv"));
    for (const char* name : {"spectrum.json", "eigvec.csv", "matrix.csv", "matrix.json"}) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
}

TEST_CASE("grid preconditions exit with a config error") {
    const auto dir = scratch("bad_grid");
    const auto r = run({"free", "--nodes", "1", "--out", dir.string()});
    CHECK(r.code == kConfigError);
    CHECK_FALSE(r.err.empty());
    CHECK(run({"free", "--nodes", "-5", "--out", dir.string()}).code == kConfigError);
    CHECK(run({"free", "--pmax", "abc", "--out", dir.string()}).code == kConfigError);
    CHECK(run({"free", "--bogus"}).code == kConfigError);
    CHECK(run({}).code == kConfigError);
    CHECK(run({"scatter", "--out", dir.string()}).code == kConfigError);
}

TEST_CASE("config file sits under explicit flags") {
    const auto dir = scratch("config");
    RunConfig c;
    c.nodes = 48;
    c.p_max = 6.0;
    c.output = (dir / "from_file").string();
    {
        std::ofstream f(dir / "run.json");
        f << serialize(c);
    }
    const auto r = run({"free", "--config", (dir / "run.json").string(), "--nodes", "40"});
    REQUIRE(r.code == kOk);
    const auto meta = nlohmann::json::parse(slurp(dir / "from_file" / "spectrum.json.meta.json"));
    CHECK(meta["config"]["nodes"] == 40);
    CHECK(meta["config"]["p_max"] == 6.0);
    CHECK(run({"free", "--config", (dir / "missing.json").string()}).code == kConfigError);
}

TEST_CASE("scatter with a vanishing potential reproduces free") {
    const auto a = scratch("scatter_zero"), b = scratch("free_ref");
    const auto s = run({"scatter", "--potential", "well:0,1", "--nodes", "64", "-o", a.string()});
    const auto f = run({"free", "--nodes", "64", "-o", b.string()});
    REQUIRE(s.code == kOk);
    REQUIRE(f.code == kOk);
    CHECK(std::abs(std::stod(s.out) - std::stod(f.out)) <= 1e-8);
    CHECK(fs::exists(a / "unitarity.csv"));
    CHECK(slurp(a / "unitarity.csv").rfind("k,re_T,im_T,re_R,im_R,abs_T2,abs_R2,unitarity_residual\n", 0) == 0);
}

TEST_CASE("scatter with a delta") {
    const auto dir = scratch("scatter_delta");
    const auto r = run({"scatter", "--potential", "delta:1", "--nodes", "64", "-o", dir.string()});
    REQUIRE(r.code == kOk);
    const double lambda = std::stod(r.out);
    CHECK(lambda < 0.0);
    CHECK(std::isfinite(lambda));
}

TEST_CASE("inadmissible potentials exit with code 4") {
    const auto dir = scratch("inadmissible");
    {
        std::ofstream f(dir / "bad.csv");
        f << "x,V\n";
        for (int i = -2000; i <= 2000; ++i) {
            const double x = 0.5 * i;
            f << format_double(x) << ',' << format_double(1.0 / (1.0 + x * x)) << '\n';
        }
    }
    const auto r = run({"scatter", "--potential", "file:" + (dir / "bad.csv").string(), "--nodes", "16", "-o", dir.string()});
    CHECK(r.code == kInadmissible);
    CHECK(run({"admissible", "--potential", "powerlaw:1,2"}).code == kInadmissible);
}

TEST_CASE("admissible prints the weighted norm") {
    const auto r = run({"admissible", "--potential", "delta:2"});
    CHECK(r.code == kOk);
    CHECK(r.out == "2\n");
    CHECK(run({"admissible", "--potential", "well:-1,1"}).out == "3\n");
}

TEST_CASE("transmission of a transparent well") {
    const auto dir = scratch("transmission");
    const auto r = run({"transmission", "--potential", "pt:1", "--kmin", "0.1", "--kmax", "10", "--nk", "30", "-o", dir.string()});
    REQUIRE(r.code == kOk);
    std::istringstream csv(slurp(dir / "transmission.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "k,re_T,im_T,re_R,im_R,abs_T2,abs_R2,unitarity_residual");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<double> cols;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cols.push_back(std::stod(cell));
        REQUIRE(cols.size() == 8);
        CHECK(cols[6] < 1e-6);
        CHECK(cols[7] <= 1e-12);
    }
    CHECK(rows == 30);
    CHECK(run({"transmission", "--potential", "pt:1", "--kmin", "0", "-o", dir.string()}).code == kConfigError);
}

TEST_CASE("evolve writes diagnostics and snapshots") {
    const auto dir = scratch("evolve");
    const auto r = run({"evolve", "--tmax", "0.5", "--sample-every", "100", "--snapshot-every", "2", "-o", dir.string()});
    REQUIRE(r.code == kOk);
    CHECK(std::stod(r.out) <= 1e-4);
    const auto diag = slurp(dir / "diagnostics.csv");
    CHECK(diag.rfind("t,P_right,j0,residual,Jf\n", 0) == 0);
    CHECK(fs::exists(dir / "snapshot_000000.csv"));
    CHECK(fs::exists(dir / "snapshot_000002.csv"));
    CHECK_FALSE(fs::exists(dir / "snapshot_000001.csv"));
    CHECK(slurp(dir / "snapshot_000000.csv").rfind("x,re,im\n", 0) == 0);
    CHECK(run({"evolve", "--potential", "delta:1", "-o", dir.string()}).code == kConfigError);
    CHECK(run({"evolve", "--npoints", "1000", "-o", dir.string()}).code == kConfigError);
}

TEST_CASE("evolve the minimizer against the classical ensemble") {
    const auto dir = scratch("evolve_min");
    const auto r = run({"evolve", "--packet", "minimizer", "--nodes", "120", "--xmin", "-512", "--xmax", "512",
                        "--npoints", "8192", "--dt", "1e-3", "--tmax", "0.5", "-o", dir.string()});
    REQUIRE(r.code == kOk);
    CHECK(std::stod(r.out) < 0.0);
    const auto j = nlohmann::json::parse(slurp(dir / "backflow.json"));
    CHECK(j["backflow"] == true);
    CHECK(j["classical_violations"] == 0);
    CHECK(j["relative_mismatch"].get<double>() <= 0.01);
    CHECK(slurp(dir / "classical.csv").rfind("t,P_right\n", 0) == 0);
}

TEST_CASE("scan reports convergence") {
    const auto dir = scratch("scan");
    const auto r = run({"scan", "--scan-nodes", "50,100", "--scan-pmax", "8", "-o", dir.string()});
    REQUIRE(r.code == kOk);
    CHECK(r.out.find("converged") != std::string::npos);
    CHECK(r.err.find("rung n=50") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "convergence.json"));
    CHECK(j["ladder"].size() == 2);
    CHECK(j["ladder"][1]["n"] == 100);
    CHECK(j.contains("converged"));
    CHECK(run({"scan", "--scan-nodes", "100,50", "-o", dir.string()}).code == kConfigError);
    CHECK(run({"scan", "--scan-nodes", "50,x", "-o", dir.string()}).code == kConfigError);
}

TEST_CASE("version and help") {
    CHECK(run({"--version"}).out == std::string(kVersion) + "\n");
    const auto h = run({"--help"});
    CHECK(h.code == kOk);
    CHECK(h.out.find("--smearing") != std::string::npos);
}
