// End-to-end checks of the command-line tool: spawns the built binary,
// parses its JSON output, and checks exit codes and byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "parisi/model_file.hpp"
#include "parisi/numerics.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    fs::path dir = fs::temp_directory_path() / "parisi_cli_test";
    fs::create_directories(dir);
    fs::path out_file = dir / "stdout.txt";
    std::string cmd = std::string(PARISI_CLI_PATH) + " " + args + " > " + out_file.string() +
                      " 2> " + (dir / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::ostringstream os;
    os << in.rdbuf();
    return {WEXITSTATUS(status), os.str()};
}

std::string write_config(const std::string& name, const std::string& text) {
    fs::path dir = fs::temp_directory_path() / "parisi_cli_test";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

const char* kSkUnit =
    "xi.kind = sk\n"
    "xi.terms = 1.0\n"
    "phi.kind = logcosh\n"
    "field.h = 0\n"
    "step.m = 0, 1\n"
    "step.q = 0, 0, 1\n";

}  // namespace

TEST_CASE("eval prints the closed-form objective for the unit SK model") {
    std::string cfg = write_config("sk_unit.txt", kSkUnit);
    RunResult r = run_cli("eval --config " + cfg);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(std::fabs(j["p_value"].get<double>() - 0.5) < 1e-6);
    CHECK(std::fabs(j["parisi_value"].get<double>() - (M_LN2 + 0.25)) < 1e-6);
    CHECK(j["refinement_error"].get<double>() >= 0.0);
}

TEST_CASE("grad reports gradients with a passing finite-difference check") {
    std::string cfg = write_config("sk_k2.txt",
                                   "xi.kind = sk\n"
                                   "xi.terms = 1.2\n"
                                   "phi.kind = logcosh\n"
                                   "field.h = 0.3\n"
                                   "step.m = 0, 0.4, 1\n"
                                   "step.q = 0, 0.3, 0.7, 1\n");
    RunResult r = run_cli("grad --config " + cfg);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["dq"].size() == 2);
    CHECK(j["dm"].size() == 2);
    CHECK(j["u_values"].size() == 2);
    CHECK(j["fd_check"]["max_rel_err_q"].get<double>() < 1e-4);
    CHECK(j["fd_check"]["max_rel_err_m"].get<double>() < 1e-4);
    for (const auto& u : j["u_values"]) CHECK(u.get<double>() >= -1e-10);
}

TEST_CASE("probe with zero trials is a configuration error (exit 2)") {
    std::string cfg = write_config("sk_unit.txt", kSkUnit);
    RunResult r = run_cli("probe --config " + cfg + " --trials 0");
    CHECK(r.exit_code == 2);
}

TEST_CASE("missing and malformed configs exit 2") {
    RunResult missing = run_cli("eval --config /nonexistent/model.txt");
    CHECK(missing.exit_code == 2);

    std::string bad_key = write_config("bad_key.txt", "xi.kind = sk\nxi.oops = 1\n");
    CHECK(run_cli("eval --config " + bad_key).exit_code == 2);

    std::string bad_step = write_config("bad_step.txt",
                                        "xi.kind = sk\nxi.terms = 1\nstep.m = 0, 0.9, 0.5\n"
                                        "step.q = 0, 0.2, 0.6, 1\n");
    CHECK(run_cli("eval --config " + bad_step).exit_code == 2);
}

TEST_CASE("probe command emits one JSON line per probe and exits 0 on success") {
    std::string cfg = write_config("sk_unit.txt", kSkUnit);
    RunResult r =
        run_cli("probe --config " + cfg + " --probe one_sided --trials 3 --k 2 --seed 5 "
                "--grid-points 1025");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["probe_name"] == "one_sided_convexity");
    CHECK(j["verdict"] == "Asserted");
    CHECK(j["instances"] == 3);
    CHECK(j["passed"] == true);
}

TEST_CASE("identical config and seed give byte-identical reports") {
    std::string cfg = write_config("sk_unit.txt", kSkUnit);
    std::string args = "probe --config " + cfg +
                       " --probe midpoint --trials 4 --k 3 --seed 9 --grid-points 1025";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    std::string eval_args = "eval --config " + cfg;
    CHECK(run_cli(eval_args).out == run_cli(eval_args).out);
}

TEST_CASE("out directory receives the report files atomically") {
    std::string cfg = write_config("sk_unit.txt", kSkUnit);
    fs::path out_dir = fs::temp_directory_path() / "parisi_cli_out";
    fs::remove_all(out_dir);
    RunResult r = run_cli("eval --config " + cfg + " --out " + out_dir.string());
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(out_dir / "report.json"));
    CHECK_FALSE(fs::exists(out_dir / "report.json.tmp"));
}

TEST_CASE("lmnorm emits the m,f,f'' table on stdout") {
    std::string cfg = write_config("sk_scalar.txt",
                                   "xi.kind = sk\nxi.terms = 1.0\nphi.kind = logcosh\n"
                                   "field.h = 0\n");
    RunResult r = run_cli("lmnorm --config " + cfg + " --m-max 1.0 --m-step 0.5 "
                          "--mc-samples 100000");
    REQUIRE(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    CHECK(header == "m,f,f_second");
    double m, f, fs;
    char c1, c2;
    is >> m >> c1 >> f >> c2 >> fs;
    CHECK(m == 0.5);
    is >> m >> c1 >> f >> c2 >> fs;
    CHECK(std::fabs(f - 0.5) < 1e-9);  // f(1) for the unit SK scalar model
}

TEST_CASE("minimize reaches the noiseless closed form and writes its history") {
    std::string cfg = write_config("sk_zero.txt",
                                   "xi.kind = sk\nxi.terms = 0.0\nphi.kind = logcosh\n"
                                   "field.h = 0.7\n");
    fs::path out_dir = fs::temp_directory_path() / "parisi_cli_min";
    fs::remove_all(out_dir);
    RunResult r = run_cli("minimize --config " + cfg +
                          " --k 1 --grid-points 513 --starts 2 --max-iters 50 --out " +
                          out_dir.string());
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    double expected = M_LN2 + std::log(std::cosh(0.7));
    CHECK(std::fabs(j["value"].get<double>() - expected) < 1e-8);
    CHECK(j["step"]["m"].size() == 2);
    CHECK(fs::exists(out_dir / "minimize.json"));
    CHECK(fs::exists(out_dir / "history.csv"));
}

TEST_CASE("sweep emits one result per k with nonincreasing values") {
    std::string cfg = write_config("sk_sweep.txt",
                                   "xi.kind = sk\nxi.terms = 0.8\nphi.kind = logcosh\n"
                                   "field.h = 0\n");
    RunResult r = run_cli("sweep --config " + cfg +
                          " --k-max 2 --grid-points 513 --starts 2 --max-iters 60");
    REQUIRE(r.exit_code == 0);
    json arr = json::parse(r.out);
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["k"] == 1);
    CHECK(arr[1]["k"] == 2);
    CHECK(arr[1]["value"].get<double>() <= arr[0]["value"].get<double>() + 1e-8);
}

TEST_CASE("gridfunction csv round-trips through the text format") {
    parisi::Grid g{6.0, 129};
    parisi::GridFunction f =
        parisi::sample_on_grid(g, [](double x) { return parisi::log_cosh(x); }, -1.0, 1.0);
    std::string csv = parisi::gridfunction_to_csv(f);
    parisi::GridFunction back = parisi::gridfunction_from_csv(csv);
    CHECK(back.grid.n_points == f.grid.n_points);
    CHECK(back.grid.half_width == doctest::Approx(f.grid.half_width).epsilon(1e-15));
    CHECK(back.left_slope == f.left_slope);
    CHECK(back.values == f.values);
}

TEST_CASE("a tabulated boundary can be supplied through the config file") {
    parisi::Grid g{16.0, 1025};
    parisi::GridFunction f =
        parisi::sample_on_grid(g, [](double x) { return x * x; }, -32.0, 32.0);
    std::string table_path = write_config("phi_sq.csv", parisi::gridfunction_to_csv(f));
    std::string cfg = write_config("tab.txt",
                                   "xi.kind = sk\nxi.terms = 1.0\n"
                                   "phi.kind = tabulated:" + table_path + "\n"
                                   "field.h = 0\nstep.m = 0, 0\nstep.q = 0, 0, 1\n");
    RunResult r = run_cli("eval --config " + cfg);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    // m = 0 everywhere: P = E (h + z)^2 = 1 at h = 0 under unit variance
    CHECK(std::fabs(j["p_value"].get<double>() - 1.0) < 1e-7);
}
