#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "wclt_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& work) {
    const fs::path out_file = work / "stdout.txt";
    const fs::path err_file = work / "stderr.txt";
    const std::string cmd = std::string(WCLT_CLI_PATH) + " " + args + " > " + out_file.string() +
                            " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WEXITSTATUS(status);
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

fs::path write_config(const fs::path& dir, const json& config) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << config.dump(2);
    return p;
}

} // namespace

TEST_CASE("simulate writes n+1 rows and reruns byte-identically") {
    const fs::path work = fresh_dir("simulate");
    const json config = {{"schema", 1},
                         {"seed", 42},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.5}}},
                         {"x0", 0.0},
                         {"n", 10}};
    const fs::path cfg = write_config(work, config);

    const CliResult r1 = run_cli("simulate --config " + cfg.string() + " --out " +
                                     (work / "run1").string(),
                                 work);
    REQUIRE(r1.exit_code == 0);
    const std::string csv1 = slurp(work / "run1" / "trajectory.csv");
    std::size_t rows = 0;
    for (char c : csv1) rows += c == '\n' ? 1 : 0;
    CHECK(rows == 12); // header + 11 states

    const CliResult r2 = run_cli("simulate --config " + cfg.string() + " --out " +
                                     (work / "run2").string(),
                                 work);
    REQUIRE(r2.exit_code == 0);
    CHECK(csv1 == slurp(work / "run2" / "trajectory.csv"));

    const json manifest = json::parse(slurp(work / "run1" / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["outputs"][0] == "trajectory.csv");
}

TEST_CASE("invalid chain parameter exits 2 and names the precondition") {
    const fs::path work = fresh_dir("invalid_a");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 1.5}}},
                         {"x0", 0.0},
                         {"n", 5}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("simulate --config " + cfg.string() + " --out " + (work / "o").string(), work);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("a must lie in (0,1)") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
    const fs::path work = fresh_dir("unknown_key");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.5}}},
                         {"x0", 0.0},
                         {"n", 5},
                         {"surprise", true}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("simulate --config " + cfg.string() + " --out " + (work / "o").string(), work);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("clt refuses a verdict for R = 50 with exit 3") {
    const fs::path work = fresh_dir("clt_small_r");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.5}}},
                         {"g", {{"kind", "coordinate"}, {"index", 0}, {"center", 0.5}}},
                         {"x0", 0.0},
                         {"n", 500},
                         {"replicates", 50},
                         {"burn_in", 0},
                         {"center", 0.0}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("clt --config " + cfg.string() + " --out " + (work / "o").string(), work);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("R >= 200") != std::string::npos);
}

TEST_CASE("poisson solves the two-state chain and echoes the original mean") {
    const fs::path work = fresh_dir("poisson");
    const json config = {
        {"schema", 1},
        {"seed", 1},
        {"poisson",
         {{"P", {{0.75, 0.25}, {0.25, 0.75}}}, {"g", {0.0, 1.0}}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("poisson --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "poisson.json"));
    CHECK(std::fabs(report["sigma2"].get<double>() - 0.75) <= 1e-10);
    CHECK(report["residual"].get<double>() <= 1e-10);
    CHECK(report["g_mean_original"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reducible matrix input exits 2 with the standard message") {
    const fs::path work = fresh_dir("poisson_reducible");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"poisson", {{"P", {{1.0, 0.0}, {0.0, 1.0}}}, {"g", {0.0, 1.0}}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("poisson --config " + cfg.string() + " --out " + (work / "o").string(), work);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("non-unique invariant distribution") != std::string::npos);
}

TEST_CASE("contraction uses and records the default pair lattice") {
    const fs::path work = fresh_dir("contraction_default");
    const json config = {{"schema", 1},
                         {"seed", 3},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.3333333333333333}}},
                         {"steps", 8},
                         {"replicates", 50}};
    const fs::path cfg = write_config(work, config);
    const CliResult r = run_cli(
        "contraction --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "contraction.json"));
    CHECK(report["default_pairs_used"] == true);
    CHECK(std::fabs(report["gamma_hat"].get<double>() - 1.0 / 3.0) <= 1e-10);
    CHECK(report["is_deterministic"] == true);
    const json manifest = json::parse(slurp(work / "o" / "manifest.json"));
    CHECK(manifest["defaults_applied"]["pair_lattice"] == true);
}

TEST_CASE("check reports the -sin condition suite") {
    const fs::path work = fresh_dir("check_negsin");
    const json config = {
        {"schema", 1},
        {"seed", 1},
        {"chain",
         {{"family", "nar"},
          {"a", 0.5},
          {"s", {{"kind", "neg-sin"}}},
          {"noise", {{"kind", "gaussian"}, {"sigma", 1.0}}}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("check --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "conditions.json"));
    CHECK(report["H"] == true);
    CHECK(report["C1"] == true);
    CHECK(report["C2"] == true);
    CHECK(report["C4"] == true);
    CHECK(report["C1_best_sup"].get<double>() < 1.0);
    CHECK(report["C2_zeta_grid_sup"].get<double>() <= 1.0 + 1e-12);
}

TEST_CASE("clt payloads are byte-identical across reruns and thread counts") {
    const fs::path work = fresh_dir("clt_threads");
    const json config = {{"schema", 1},
                         {"seed", 11},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.5}}},
                         {"g", {{"kind", "coordinate"}, {"index", 0}, {"center", 0.5}}},
                         {"x0", 0.0},
                         {"n", 1000},
                         {"replicates", 300},
                         {"burn_in", 0},
                         {"center", 0.0},
                         {"sigma2_reference", 0.25}};
    const fs::path cfg = write_config(work, config);

    const CliResult r1 = run_cli("clt --config " + cfg.string() + " --threads 1 --out " +
                                     (work / "t1").string(),
                                 work);
    const CliResult r4 = run_cli("clt --config " + cfg.string() + " --threads 4 --out " +
                                     (work / "t4").string(),
                                 work);
    const CliResult r4b = run_cli("clt --config " + cfg.string() + " --threads 4 --out " +
                                      (work / "t4b").string(),
                                  work);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r4.exit_code == 0);
    REQUIRE(r4b.exit_code == 0);
    CHECK(slurp(work / "t1" / "replicates.csv") == slurp(work / "t4" / "replicates.csv"));
    CHECK(slurp(work / "t1" / "clt_report.json") == slurp(work / "t4" / "clt_report.json"));
    CHECK(slurp(work / "t4" / "clt_report.json") == slurp(work / "t4b" / "clt_report.json"));
}

TEST_CASE("check emits the ULA constants table over a requested h grid") {
    const fs::path work = fresh_dir("check_ula");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain",
                          {{"family", "ula"},
                           {"h", 0.1},
                           {"target", {{"kind", "quadratic"}, {"A", {{1.0}}}}}}},
                         {"h_grid", {0.1, 0.5, 1.0, 2.0}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("check --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "conditions.json"));
    CHECK(report["L"] == 1.0);
    CHECK(report["M"] == 1.0);
    CHECK(report["h_max"] == 2.0);
    REQUIRE(report["gamma_table"].size() == 4);
    CHECK(report["gamma_table"][0]["gamma"] == 0.9);
    CHECK(std::fabs(report["gamma_table"][3]["gamma"].get<double>() - 1.0) <= 1e-12);
}

TEST_CASE("check flags a flat nonlinearity as H-inconclusive") {
    const fs::path work = fresh_dir("check_flat");
    const json config = {
        {"schema", 1},
        {"seed", 1},
        {"chain",
         {{"family", "nar"},
          {"a", 0.5},
          {"s", {{"kind", "affine-cap"}, {"slope", 0.0}, {"cap", 1.0}}},
          {"noise", {{"kind", "gaussian"}, {"sigma", 1.0}}}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("check --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "conditions.json"));
    CHECK(report["H"] == false);
    CHECK(report["H_inconclusive"] == true);
}

TEST_CASE("check runs the moment-evidence blocks") {
    const fs::path work = fresh_dir("check_moments");
    const json config = {
        {"schema", 1},
        {"seed", 2},
        {"chain",
         {{"family", "nar"},
          {"a", 0.5},
          {"s", {{"kind", "neg-sin"}}},
          {"noise", {{"kind", "gaussian"}, {"sigma", 1.0}}}}},
        {"a2", {{"lambda", "nar-drift"}, {"rho_r", 0.9}, {"samples", 50000}}},
        {"p2", {{"samples", 50000}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("check --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "conditions.json"));
    CHECK(report["A2"]["verdict"] == "evidence-finite");
    CHECK(report["P2"]["verdict"] == "evidence-finite");
    CHECK(report["A2"]["diverged"] == false);
    CHECK(report["A2"]["estimate"].get<double>() > 0.0);
}

TEST_CASE("clt reports unit acceptance for the null EI-MALA") {
    const fs::path work = fresh_dir("clt_eimala");
    const json config = {{"schema", 1},
                         {"seed", 8},
                         {"chain",
                          {{"family", "ei-mala"},
                           {"h", 0.7},
                           {"H", {{1.0, 0.0}, {0.0, 4.0}}},
                           {"gamma", {{"kind", "zero"}}},
                           {"Gamma", {{"kind", "zero"}}}}},
                         {"g", {{"kind", "coordinate"}, {"index", 0}, {"center", 0.0}}},
                         {"x0", {0.0, 0.0}},
                         {"n", 1000},
                         {"replicates", 200},
                         {"burn_in", 100},
                         {"center", 0.0}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("clt --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "clt_report.json"));
    CHECK(report["acceptance_rate"] == 1.0);
    CHECK(report["provenance"]["config_hash"].is_string());
}

TEST_CASE("poisson accepts the CSV finite-chain input format") {
    const fs::path work = fresh_dir("poisson_csv");
    {
        std::ofstream m(work / "P.csv");
        m << "0.75,0.25\n0.25,0.75\n";
        std::ofstream v(work / "g.csv");
        v << "0\n1\n";
    }
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"poisson",
                          {{"matrix_csv", (work / "P.csv").string()},
                           {"g_csv", (work / "g.csv").string()}}}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("poisson --config " + cfg.string() + " --out " + (work / "o").string(), work);
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(work / "o" / "poisson.json"));
    CHECK(std::fabs(report["sigma2"].get<double>() - 0.75) <= 1e-10);
}

TEST_CASE("divergent simulation exits 4 as a numerical failure") {
    const fs::path work = fresh_dir("sim_diverge");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain",
                          {{"family", "ula"},
                           {"h", 3.0},
                           {"target", {{"kind", "quadratic"}, {"A", {{1.0}}}}}}},
                         {"x0", 1.0},
                         {"n", 10000}};
    const fs::path cfg = write_config(work, config);
    const CliResult r =
        run_cli("simulate --config " + cfg.string() + " --out " + (work / "o").string(), work);
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("seed override changes outputs and is recorded") {
    const fs::path work = fresh_dir("seed_override");
    const json config = {{"schema", 1},
                         {"seed", 1},
                         {"chain", {{"family", "bernoulli-ar1"}, {"a", 0.5}}},
                         {"x0", 0.0},
                         {"n", 20}};
    const fs::path cfg = write_config(work, config);
    const CliResult r1 = run_cli("simulate --config " + cfg.string() + " --out " +
                                     (work / "a").string(),
                                 work);
    const CliResult r2 = run_cli("simulate --config " + cfg.string() + " --seed 99 --out " +
                                     (work / "b").string(),
                                 work);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(work / "a" / "trajectory.csv") != slurp(work / "b" / "trajectory.csv"));
    const json manifest = json::parse(slurp(work / "b" / "manifest.json"));
    CHECK(manifest["seed"] == 99);
}
