#include "cli/commands.hpp"

#include <chrono>
#include <sstream>

#include "cli/config.hpp"
#include "cli/io.hpp"
#include "wclt/clt.hpp"
#include "wclt/conditions.hpp"
#include "wclt/martingale.hpp"
#include "wclt/simulate.hpp"
#include "wclt/version.hpp"
#include "wclt/wasserstein.hpp"

namespace wclt::cli {

namespace {

std::uint64_t config_seed(const json& config) {
    if (!config.contains("seed") || !config["seed"].is_number_unsigned()) {
        if (config.contains("seed") && config["seed"].is_number_integer()) {
            const std::int64_t s = config["seed"].get<std::int64_t>();
            if (s >= 0) return static_cast<std::uint64_t>(s);
        }
        throw ConfigError("config: \"seed\" must be a non-negative integer");
    }
    return config["seed"].get<std::uint64_t>();
}

void check_schema(const json& config) {
    if (!config.contains("schema") || !config["schema"].is_number_integer() ||
        config["schema"].get<int>() != 1) {
        throw ConfigError("config: \"schema\" must be 1");
    }
}

struct ManifestWriter {
    json manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    ManifestWriter(const RunContext& ctx) {
        manifest["schema"] = 1;
        manifest["command"] = ctx.command;
        manifest["config_hash"] = config_hash(ctx.config);
        manifest["tool_version"] = kToolVersion;
        manifest["threads"] = ctx.threads;
        manifest["seed"] = config_seed(ctx.config);
        manifest["outputs"] = json::array();
        manifest["config"] = ctx.config;
    }

    void add_output(const std::string& name) { manifest["outputs"].push_back(name); }

    void finish(const std::filesystem::path& out_dir) {
        const auto elapsed = std::chrono::steady_clock::now() - start;
        manifest["wall_clock_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
};

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir.string());
}

json provenance(const RunContext& ctx) {
    json p;
    p["config_hash"] = config_hash(ctx.config);
    p["seed"] = config_seed(ctx.config);
    p["tool_version"] = kToolVersion;
    return p;
}

Exec exec_policy(const RunContext& ctx) {
    return ctx.threads == 1 ? Exec::serial : Exec::openmp;
}

} // namespace

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

void run_simulate(const RunContext& ctx) {
    const json& config = ctx.config;
    check_schema(config);
    require_keys(config, {"schema", "seed", "chain", "x0", "n", "stream"}, "simulate config");
    require_present(config, "chain", "simulate config");
    require_present(config, "x0", "simulate config");
    const ChainSpec chain = parse_chain(config["chain"], "chain");
    const std::int64_t n = get_integer(config, "n", "simulate config");
    if (n < 0) throw ConfigError("simulate config: n must be >= 0");
    const State x0 = parse_state(config["x0"], chain.kernel->dimension(), "x0");
    const std::uint64_t stream =
        config.contains("stream") ? static_cast<std::uint64_t>(get_integer(config, "stream", "simulate config"))
                                  : 0;

    ensure_out_dir(ctx.out_dir);
    ManifestWriter manifest(ctx);

    const Trajectory traj = simulate(*chain.kernel, x0, static_cast<std::size_t>(n),
                                     RngStream(config_seed(config), stream));

    std::ostringstream csv;
    csv << "step";
    for (std::size_t d = 0; d < chain.kernel->dimension(); ++d) csv << ",coord" << d;
    csv << "\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        csv << k;
        for (double v : traj.states[k].coords) csv << "," << format_double(v);
        csv << "\n";
    }
    write_file_atomic(ctx.out_dir / "trajectory.csv", csv.str());
    manifest.add_output("trajectory.csv");
    manifest.manifest["seeds"] = {{"trajectory_stream", stream}};
    manifest.finish(ctx.out_dir);
}

// ---------------------------------------------------------------------------
// contraction
// ---------------------------------------------------------------------------

void run_contraction(const RunContext& ctx) {
    const json& config = ctx.config;
    check_schema(config);
    require_keys(config,
                 {"schema", "seed", "chain", "pairs", "steps", "replicates", "metric"},
                 "contraction config");
    require_present(config, "chain", "contraction config");
    const ChainSpec chain = parse_chain(config["chain"], "chain");

    ContractionOptions opts;
    opts.seed = config_seed(config);
    opts.threads = ctx.threads;
    opts.exec = exec_policy(ctx);
    if (config.contains("steps")) {
        const std::int64_t s = get_integer(config, "steps", "contraction config");
        if (s < 1) throw ConfigError("contraction config: steps must be >= 1");
        opts.steps = static_cast<std::size_t>(s);
    }
    if (config.contains("replicates")) {
        const std::int64_t r = get_integer(config, "replicates", "contraction config");
        if (r < 1) throw ConfigError("contraction config: replicates must be >= 1");
        opts.replicates = static_cast<std::size_t>(r);
    }
    if (config.contains("metric")) opts.psi = parse_metric(config["metric"], "metric");

    bool default_pairs = false;
    std::vector<std::pair<State, State>> pairs;
    if (config.contains("pairs")) {
        const json& jp = config["pairs"];
        if (!jp.is_array() || jp.empty()) throw ConfigError("contraction config: pairs must be a non-empty array");
        for (const auto& item : jp) {
            if (!item.is_array() || item.size() != 2) {
                throw ConfigError("contraction config: each pair must have two states");
            }
            pairs.emplace_back(parse_state(item[0], chain.kernel->dimension(), "pairs"),
                               parse_state(item[1], chain.kernel->dimension(), "pairs"));
        }
    } else {
        if (chain.kernel->dimension() != 1) {
            throw ConfigError("contraction config: pairs are required for d > 1 chains");
        }
        pairs = default_pair_lattice(chain.domain_lo, chain.domain_hi);
        default_pairs = true;
    }

    ensure_out_dir(ctx.out_dir);
    ManifestWriter manifest(ctx);

    const ContractionEstimate est = estimate_contraction(*chain.kernel, pairs, opts);

    json report;
    report["provenance"] = provenance(ctx);
    report["family"] = family_name(chain.family);
    report["gamma_hat"] = est.gamma_hat;
    report["is_deterministic"] = est.deterministic;
    report["truncated"] = est.truncated;
    report["steps"] = opts.steps;
    report["replicates_per_pair"] = opts.replicates;
    json jpairs = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        json p;
        p["x"] = pairs[i].first.coords;
        p["y"] = pairs[i].second.coords;
        p["rate"] = est.pair_rates[i];
        p["step_ratios"] = est.step_ratios[i];
        jpairs.push_back(p);
    }
    report["pairs"] = jpairs;
    report["default_pairs_used"] = default_pairs;
    write_file_atomic(ctx.out_dir / "contraction.json", report.dump(2) + "\n");
    manifest.add_output("contraction.json");
    manifest.manifest["defaults_applied"] = {{"pair_lattice", default_pairs}};
    manifest.finish(ctx.out_dir);
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

void run_check(const RunContext& ctx) {
    const json& config = ctx.config;
    check_schema(config);
    require_keys(config,
                 {"schema", "seed", "chain", "grid_points", "pair_grid", "r_grid", "h_grid",
                  "a2", "p2"},
                 "check config");
    require_present(config, "chain", "check config");
    const ChainSpec chain = parse_chain(config["chain"], "chain");

    ensure_out_dir(ctx.out_dir);
    ManifestWriter manifest(ctx);

    json report;
    report["provenance"] = provenance(ctx);
    report["family"] = family_name(chain.family);

    if (chain.family == Family::nar) {
        const NarParams& p = *chain.nar;

        std::vector<double> points;
        if (config.contains("grid_points")) {
            const Eigen::VectorXd v = parse_vector(config["grid_points"], "grid_points");
            points.assign(v.data(), v.data() + v.size());
        } else {
            points = default_nar_point_grid();
        }
        std::vector<std::pair<double, double>> pair_grid;
        if (config.contains("pair_grid")) {
            for (const auto& item : config["pair_grid"]) {
                if (!item.is_array() || item.size() != 2) {
                    throw ConfigError("check config: pair_grid entries must be [x, y]");
                }
                pair_grid.emplace_back(item[0].get<double>(), item[1].get<double>());
            }
        } else {
            pair_grid = default_nar_pair_grid();
        }
        std::vector<double> r_grid;
        if (config.contains("r_grid")) {
            const Eigen::VectorXd v = parse_vector(config["r_grid"], "r_grid");
            r_grid.assign(v.data(), v.data() + v.size());
        } else {
            r_grid = default_r_grid();
        }

        const HReport h = check_H(p.s, p.a, points);
        const C1Report c1 = check_C1(p, r_grid, pair_grid, ctx.threads, exec_policy(ctx));

        report["H"] = h.holds;
        report["H_inconclusive"] = h.inconclusive;
        if (h.witness) {
            json w;
            w["kind"] = h.witness->kind == HWitness::Kind::pair_quotient ? "pair-quotient"
                                                                         : "derivative-point";
            w["x"] = h.witness->x;
            w["y"] = h.witness->y;
            w["value"] = h.witness->value;
            w["threshold"] = h.witness->threshold;
            report["H_witness"] = w;
        }
        report["C1"] = c1.holds;
        report["C1_best_r"] = c1.best_r;
        report["C1_best_sup"] = c1.best_sup;
        report["C1_sup_per_r"] = c1.sup_per_r;
        report["C2"] = true; // zeta bounded on the grid; weak Feller by construction
        report["C2_zeta_grid_sup"] = c1.zeta_sup;
        report["C4"] = true; // every configured nonlinearity is bounded
        report["C4_bound"] = p.s.bound();
        report["grid_evidence_only"] = true;
        report["grid_sizes"] = {{"points", points.size()}, {"pairs", pair_grid.size()},
                                {"r", r_grid.size()}};
        manifest.manifest["defaults_applied"] = {
            {"point_grid", !config.contains("grid_points")},
            {"pair_grid", !config.contains("pair_grid")},
            {"r_grid", !config.contains("r_grid")}};
    } else if (chain.family == Family::ula) {
        const UlaContractionCert cert = ula_constants(*chain.ula);
        report["L"] = cert.L;
        report["M"] = cert.M;
        report["h_max"] = cert.h_max;
        json table = json::array();
        std::vector<double> hs;
        if (config.contains("h_grid")) {
            const Eigen::VectorXd v = parse_vector(config["h_grid"], "h_grid");
            hs.assign(v.data(), v.data() + v.size());
        } else {
            for (int i = 1; i <= 8; ++i) hs.push_back(cert.h_max * i / 8.0);
        }
        for (double h : hs) {
            json row;
            row["h"] = h;
            row["gamma"] = cert.gamma(h);
            table.push_back(row);
        }
        report["gamma_table"] = table;
    } else {
        throw ConfigError("check supports nar and ula chains");
    }

    // Optional moment evidence blocks.
    if (config.contains("a2")) {
        const json& a2 = config["a2"];
        require_keys(a2, {"lambda", "samples", "burn_in", "x0", "rho_r", "constant"}, "a2");
        const std::string lkind = a2.contains("lambda") ? a2["lambda"].get<std::string>()
                                                        : std::string("bounded-one");
        LambdaSpec lambda = LambdaSpec::bounded_one();
        if (lkind == "nar-drift") {
            if (chain.family != Family::nar) throw ConfigError("a2: nar-drift needs a nar chain");
            const double rho_r = a2.contains("rho_r") ? get_number(a2, "rho_r", "a2") : 0.5;
            lambda = LambdaSpec::nar_drift(*chain.nar, rho_r);
        } else if (lkind == "bounded-one") {
            lambda = LambdaSpec::bounded_one(
                a2.contains("constant") ? get_number(a2, "constant", "a2") : 1.0);
        } else {
            throw ConfigError("a2: unknown lambda kind \"" + lkind + "\"");
        }
        const std::size_t samples =
            a2.contains("samples") ? static_cast<std::size_t>(get_integer(a2, "samples", "a2"))
                                   : 100000;
        const std::size_t burn_in =
            a2.contains("burn_in") ? static_cast<std::size_t>(get_integer(a2, "burn_in", "a2"))
                                   : 1000;
        const State x0 = a2.contains("x0")
                             ? parse_state(a2["x0"], chain.kernel->dimension(), "a2.x0")
                             : State(std::vector<double>(chain.kernel->dimension(), 0.0));
        const MomentReport mr = check_A2(lambda, *chain.kernel, x0, burn_in, samples,
                                         RngStream(config_seed(config), 100));
        report["A2"] = {{"estimate", mr.estimate},
                        {"std_error", mr.std_error},
                        {"verdict", mr.evidence_finite ? "evidence-finite" : "unstable"},
                        {"diverged", mr.diverged},
                        {"prefix_estimates", mr.prefix_estimates}};
    }
    if (config.contains("p2")) {
        const json& p2 = config["p2"];
        require_keys(p2, {"samples", "burn_in", "x0", "metric"}, "p2");
        const Metric psi = p2.contains("metric") ? parse_metric(p2["metric"], "p2.metric")
                                                 : Metric::euclidean();
        const std::size_t samples =
            p2.contains("samples") ? static_cast<std::size_t>(get_integer(p2, "samples", "p2"))
                                   : 100000;
        const std::size_t burn_in =
            p2.contains("burn_in") ? static_cast<std::size_t>(get_integer(p2, "burn_in", "p2"))
                                   : 1000;
        const State x0 = p2.contains("x0")
                             ? parse_state(p2["x0"], chain.kernel->dimension(), "p2.x0")
                             : State(std::vector<double>(chain.kernel->dimension(), 0.0));
        const MomentReport mr =
            check_P2(*chain.kernel, psi, x0, burn_in, samples, RngStream(config_seed(config), 101));
        report["P2"] = {{"estimate", mr.estimate},
                        {"std_error", mr.std_error},
                        {"verdict", mr.evidence_finite ? "evidence-finite" : "unstable"},
                        {"diverged", mr.diverged},
                        {"prefix_estimates", mr.prefix_estimates}};
    }

    write_file_atomic(ctx.out_dir / "conditions.json", report.dump(2) + "\n");
    manifest.add_output("conditions.json");
    manifest.finish(ctx.out_dir);
}

// ---------------------------------------------------------------------------
// clt
// ---------------------------------------------------------------------------

void run_clt(const RunContext& ctx) {
    const json& config = ctx.config;
    check_schema(config);
    require_keys(config,
                 {"schema", "seed", "chain", "g", "x0", "n", "replicates", "burn_in", "center",
                  "estimate_center", "center_run_length", "bm_run_length", "bm_batches",
                  "sigma2_reference", "ks_level"},
                 "clt config");
    require_present(config, "chain", "clt config");
    require_present(config, "g", "clt config");
    require_present(config, "x0", "clt config");
    const ChainSpec chain = parse_chain(config["chain"], "chain");
    const TestFunction g = parse_test_function(config["g"], "g");
    const State x0 = parse_state(config["x0"], chain.kernel->dimension(), "x0");

    CltOptions opts;
    opts.seed = config_seed(config);
    opts.threads = ctx.threads;
    opts.exec = exec_policy(ctx);
    opts.n = static_cast<std::size_t>(get_integer(config, "n", "clt config"));
    opts.replicates = static_cast<std::size_t>(get_integer(config, "replicates", "clt config"));
    if (config.contains("burn_in")) {
        opts.burn_in = static_cast<std::size_t>(get_integer(config, "burn_in", "clt config"));
    }
    if (config.contains("center")) opts.center = get_number(config, "center", "clt config");
    if (config.contains("estimate_center")) opts.estimate_center = config["estimate_center"].get<bool>();
    if (config.contains("center_run_length")) {
        opts.center_run_length =
            static_cast<std::size_t>(get_integer(config, "center_run_length", "clt config"));
    }
    if (config.contains("bm_run_length")) {
        opts.bm_run_length =
            static_cast<std::size_t>(get_integer(config, "bm_run_length", "clt config"));
    }
    if (config.contains("bm_batches")) {
        opts.bm_batches = static_cast<std::size_t>(get_integer(config, "bm_batches", "clt config"));
    }
    if (config.contains("sigma2_reference")) {
        opts.sigma2_reference = get_number(config, "sigma2_reference", "clt config");
    }
    if (config.contains("ks_level")) {
        const std::string level = config["ks_level"].get<std::string>();
        if (level == "1%") {
            opts.level = KsLevel::one_percent;
        } else if (level == "5%") {
            opts.level = KsLevel::five_percent;
        } else {
            throw ConfigError("clt config: ks_level must be \"1%\" or \"5%\"");
        }
    }

    ensure_out_dir(ctx.out_dir);
    ManifestWriter manifest(ctx);

    const CltReport rep = run_clt_experiment(*chain.kernel, g, x0, opts);

    json report;
    report["provenance"] = provenance(ctx);
    report["family"] = family_name(chain.family);
    report["n"] = rep.n;
    report["replicates"] = rep.replicates;
    report["burn_in"] = rep.burn_in;
    report["center"] = rep.center;
    report["center_estimated"] = rep.center_estimated;
    report["center_std_error"] = rep.center_std_error;
    report["replicate_mean"] = rep.replicate_mean;
    report["replicate_variance"] = rep.replicate_variance;
    report["sigma2_batch_means"] = rep.batch.estimate;
    report["sigma2_batch_means_std_error"] = rep.batch.std_error;
    report["batch_count"] = rep.batch.batches;
    report["batch_length"] = rep.batch.batch_len;
    if (rep.sigma2_reference) report["sigma2_reference"] = *rep.sigma2_reference;
    report["ks_sigma2"] = rep.ks_sigma2;
    report["ks_sigma2_source"] = rep.sigma2_reference ? "reference" : "batch-means";
    report["degenerate"] = rep.degenerate;
    if (!rep.degenerate) {
        report["ks_statistic"] = rep.ks.statistic;
        report["ks_critical"] = rep.ks.critical;
        report["ks_pass"] = rep.ks.pass;
        report["ks_level"] = opts.level == KsLevel::one_percent ? "1%" : "5%";
    }
    if (rep.acceptance_rate) report["acceptance_rate"] = *rep.acceptance_rate;
    report["seeds"] = {{"center_stream", 0},
                       {"batch_means_stream", 1},
                       {"replicate_stream_first", 2},
                       {"replicate_stream_last", 1 + rep.replicates}};
    write_file_atomic(ctx.out_dir / "clt_report.json", report.dump(2) + "\n");
    manifest.add_output("clt_report.json");

    std::ostringstream csv;
    csv << "replicate,value\n";
    for (std::size_t r = 0; r < rep.replicate_values.size(); ++r) {
        csv << r << "," << format_double(rep.replicate_values[r]) << "\n";
    }
    write_file_atomic(ctx.out_dir / "replicates.csv", csv.str());
    manifest.add_output("replicates.csv");
    manifest.finish(ctx.out_dir);
}

// ---------------------------------------------------------------------------
// poisson
// ---------------------------------------------------------------------------

void run_poisson(const RunContext& ctx) {
    const json& config = ctx.config;
    check_schema(config);
    require_keys(config, {"schema", "seed", "poisson"}, "poisson config");
    require_present(config, "poisson", "poisson config");
    const json& pc = config["poisson"];
    require_keys(pc, {"matrix_csv", "g_csv", "P", "g"}, "poisson config");

    Eigen::MatrixXd P;
    if (pc.contains("matrix_csv")) {
        P = read_csv_matrix(pc["matrix_csv"].get<std::string>());
    } else if (pc.contains("P")) {
        P = parse_matrix(pc["P"], "poisson.P");
    } else {
        throw ConfigError("poisson config: supply matrix_csv or P");
    }

    auto chain = FiniteChain::from_matrix(std::move(P));

    Eigen::VectorXd raw;
    if (pc.contains("g_csv")) {
        raw = read_csv_vector(pc["g_csv"].get<std::string>());
    } else if (pc.contains("g")) {
        raw = parse_vector(pc["g"], "poisson.g");
    } else {
        // Default observable: the state index.
        raw.resize(static_cast<Eigen::Index>(chain->n_states()));
        for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i) = static_cast<double>(i);
    }
    if (raw.size() != static_cast<Eigen::Index>(chain->n_states())) {
        throw ConfigError("poisson config: g length must match the matrix size");
    }

    ensure_out_dir(ctx.out_dir);
    ManifestWriter manifest(ctx);

    const CenteredFunction g(*chain, raw);
    const PoissonSolution sol = poisson_solve(*chain, g);
    const double sigma2 = asymptotic_variance(*chain, g);

    json report;
    report["provenance"] = provenance(ctx);
    report["n_states"] = chain->n_states();
    report["g_mean_original"] = g.original_mean();
    report["sigma2"] = sigma2;
    report["sigma2_uncorrelated"] = stationary_second_moment(*chain, g);
    report["residual"] = sol.residual;
    report["series_checked"] = sol.series_checked;
    if (sol.series_checked) report["series_gap"] = sol.series_gap;
    report["least_squares_fallback"] = sol.least_squares_fallback;
    report["pi"] = std::vector<double>(chain->pi().data(), chain->pi().data() + chain->pi().size());
    report["h"] = std::vector<double>(sol.h.data(), sol.h.data() + sol.h.size());
    write_file_atomic(ctx.out_dir / "poisson.json", report.dump(2) + "\n");
    manifest.add_output("poisson.json");
    manifest.finish(ctx.out_dir);
}

} // namespace wclt::cli
