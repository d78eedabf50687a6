// blowup — boundary blow-up laboratory for subordinate Laplacians on balls.
//
// Subcommands:
//   check   run the admissibility condition suite, write report.json
//   solve   full pipeline: assemble, supersolution, monotone large solve,
//           rate fit; writes u.csv, ubar.csv, trace.json
//   rate    fit the blow-up exponent from a stored field
//   verify  run the structural verifier battery against stored artifacts
//   report  sweep an (alpha, p) lattice into one admissibility table

#include <CLI11.hpp>

#include "blowup/config.hpp"
#include "blowup/conditions.hpp"
#include "blowup/io.hpp"
#include "blowup/op.hpp"
#include "blowup/solver.hpp"
#include "blowup/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace blowup;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotAdmissible = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFingerprint = 3;
constexpr int kExitStage = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    bool no_cache = false;
    int threads = -1;
};

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(args.config_path);
    if (!args.out_override.empty()) cfg.out_dir = args.out_override;
    if (args.no_cache) cfg.cache = false;
    if (args.threads >= 0) cfg.threads = args.threads;
    return cfg;
}

DiscreteOperator obtain_operator(const ExperimentConfig& cfg, int n) {
    ExperimentConfig keyed = cfg;
    keyed.grid_n = n;
    const std::string key = keyed.operator_fingerprint();
    const std::string path = cfg.out_dir + "/cache/op_" + key + ".bin";
    if (cfg.cache) {
        if (auto cached = io::load_operator_cache(path, key)) {
            std::cout << "operator cache hit: " << path << "\n";
            return std::move(*cached);
        }
    }
    auto grid = RadialGrid::build(cfg.make_domain(), n, cfg.grid_gamma);
    DiscreteOperator op =
        DiscreteOperator::assemble(cfg.make_spec(), cfg.make_domain(), grid,
                                   cfg.assemble_options());
    if (cfg.cache) io::save_operator_cache(path, op, key);
    return op;
}

int run_check(const ExperimentConfig& cfg) {
    ConditionReport rep = full_report(cfg.make_spec(), cfg.make_nonlinearity(),
                                      cfg.condition_options());
    io::atomic_write(cfg.out_dir + "/report.json",
                     io::condition_report_json(rep, cfg.fingerprint()));
    std::cout << io::condition_report_table(rep);
    return rep.admissible ? kExitOk : kExitNotAdmissible;
}

int run_solve(const ExperimentConfig& cfg) {
    ConditionReport rep = full_report(cfg.make_spec(), cfg.make_nonlinearity(),
                                      cfg.condition_options());
    if (!rep.admissible) {
        std::cout << io::condition_report_table(rep);
        std::cerr << "solve: configuration not admissible (" << rep.reason << ")\n";
        return kExitNotAdmissible;
    }
    const std::string fp = cfg.fingerprint();
    const std::vector<std::string> artifacts = {cfg.out_dir + "/u.csv",
                                                cfg.out_dir + "/ubar.csv",
                                                cfg.out_dir + "/trace.json"};
    std::string stage = "setup";
    try {
        BernsteinSpec spec = cfg.make_spec();
        Nonlinearity nl = cfg.make_nonlinearity();
        RenewalSurrogate sur = renewal_surrogate(spec);

        stage = "assemble";
        DiscreteOperator op = obtain_operator(cfg, cfg.grid_n);
        DiscreteOperator op_coarse = obtain_operator(cfg, cfg.grid_n / 2);

        stage = "supersolution";
        const double eta = cfg.supersolution_eta * cfg.radius;
        BandCheck band = verify_supersolution_band(op, op_coarse, sur, nl, eta,
                                                   cfg.solver_options());
        if (!band.verdict)
            throw std::runtime_error("band ratio did not stabilize under refinement (C2 " +
                                     io::fmt17(band.c2_coarse) + " -> " +
                                     io::fmt17(band.c2) + ")");
        Field U = build_U(op.grid_ptr(), sur, nl);
        SupersolutionBundle bundle =
            build_supersolution(op, U, nl, band.c2, eta, cfg.solver_options());

        stage = "solve";
        MartinProfile martin = discrete_martin_profile(op, sur);
        SolveTrace trace =
            solve_large(op, nl, bundle, martin, sur, cfg.solver_options());

        stage = "rate";
        RateFit fit = fit_blowup_rate(*trace.u, cfg.rate_delta_lo * cfg.radius,
                                      cfg.rate_delta_hi * cfg.radius);
        io::RateInfo rate;
        rate.beta = fit.beta;
        rate.residual_rms = fit.residual_rms;
        rate.window_lo = cfg.rate_delta_lo * cfg.radius;
        rate.window_hi = cfg.rate_delta_hi * cfg.radius;
        if (cfg.phi_family == "stable" && cfg.f_family == "power")
            rate.expected = cfg.phi_params.at("alpha") / (cfg.f_p - 1.0);

        stage = "write";
        const auto& grid = op.grid();
        std::vector<double> vstar_u(static_cast<std::size_t>(grid.size()));
        std::vector<double> vstar_ubar(static_cast<std::size_t>(grid.size()));
        for (int i = 0; i < grid.size(); ++i) {
            double vs = sur.vstar(grid.delta(i));
            vstar_u[static_cast<std::size_t>(i)] = vs * (*trace.u)[i];
            vstar_ubar[static_cast<std::size_t>(i)] = vs * bundle.ubar[i];
        }
        io::write_solution_csv(artifacts[0], grid, trace.u->values(),
                               bundle.ubar.values(), vstar_u, fp);
        io::write_solution_csv(artifacts[1], grid, bundle.ubar.values(),
                               bundle.ubar.values(), vstar_ubar, fp);
        io::atomic_write(artifacts[2], io::trace_json(trace, bundle, rate, fp));

        std::cout << "solve: " << trace.rounds.size() << " rounds, final k "
                  << trace.rounds.back().k << ", beta " << io::fmt17(fit.beta);
        if (rate.expected > 0.0) std::cout << " (expected " << io::fmt17(rate.expected) << ")";
        std::cout << "\nartifacts: " << artifacts[0] << ", " << artifacts[1] << ", "
                  << artifacts[2] << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        for (const auto& a : artifacts) {
            std::error_code ec;
            fs::remove(a, ec);
        }
        std::cerr << "solve: stage '" << stage << "' failed: " << e.what() << "\n";
        return kExitStage;
    }
}

int run_rate(const ExperimentConfig& cfg, const std::string& field_path) {
    std::string path = field_path.empty() ? cfg.out_dir + "/u.csv" : field_path;
    io::SolutionCsv csv = io::read_solution_csv(path);
    if (csv.fingerprint != cfg.fingerprint()) {
        std::cerr << "rate: artifact fingerprint mismatch\n";
        return kExitFingerprint;
    }
    std::vector<double> ds, us;
    for (std::size_t i = 0; i < csv.delta.size(); ++i) {
        double d = csv.delta[i];
        if (d < cfg.rate_delta_lo * cfg.radius || d > cfg.rate_delta_hi * cfg.radius)
            continue;
        ds.push_back(d);
        us.push_back(csv.u[i]);
    }
    if (ds.size() < 8) {
        std::cerr << "rate: fewer than 8 nodes in the window\n";
        return kExitStage;
    }
    auto fit = fit_log_slope(ds, us);
    std::cout << "beta " << io::fmt17(-fit.slope) << " residual_rms "
              << io::fmt17(fit.residual_rms) << " nodes " << ds.size() << "\n";
    return kExitOk;
}

int run_verify(const ExperimentConfig& cfg) {
    const std::string fp = cfg.fingerprint();
    io::SolutionCsv ucsv, ubarcsv;
    io::TraceSummary trace;
    try {
        ucsv = io::read_solution_csv(cfg.out_dir + "/u.csv");
        ubarcsv = io::read_solution_csv(cfg.out_dir + "/ubar.csv");
        trace = io::read_trace_json(cfg.out_dir + "/trace.json");
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitStage;
    }
    if (ucsv.fingerprint != fp || ubarcsv.fingerprint != fp || trace.fingerprint != fp) {
        std::cerr << "verify: artifact fingerprint does not match the config\n";
        return kExitFingerprint;
    }
    if (static_cast<int>(ucsv.u.size()) != cfg.grid_n) {
        std::cerr << "verify: artifact resolution does not match the config\n";
        return kExitFingerprint;
    }

    BernsteinSpec spec = cfg.make_spec();
    Nonlinearity nl = cfg.make_nonlinearity();
    RenewalSurrogate sur = renewal_surrogate(spec);
    DiscreteOperator op = obtain_operator(cfg, cfg.grid_n);
    Field u(op.grid_ptr(), ucsv.u);
    Field ubar(op.grid_ptr(), ubarcsv.u);
    MartinProfile martin = discrete_martin_profile(op, sur);

    const int n = op.size();
    std::mt19937_64 rng(cfg.seed);
    auto rand_band = [&](int max_hi, int min_w, int max_w) {
        std::uniform_int_distribution<int> lo_d(0, std::max(0, max_hi - min_w));
        int lo = lo_d(rng);
        std::uniform_int_distribution<int> w_d(min_w, max_w);
        return Band{lo, std::min(max_hi, lo + w_d(rng))};
    };

    std::vector<CheckResult> results;
    {
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        std::vector<double> g(static_cast<std::size_t>(n));
        for (auto& x : g) x = ud(rng);
        Field h = op.green_apply(Field(op.grid_ptr(), g));
        std::vector<Band> bands;
        for (int b = 0; b < 100; ++b) bands.push_back(rand_band(n - 2, 12, 200));
        results.push_back(check_superharmonic(op, h, bands));
    }
    {
        int hi_cap = op.grid().last_index_with_delta_at_least(0.05 * cfg.radius);
        std::vector<Band> bands;
        for (int b = 0; b < 6; ++b) bands.push_back(rand_band(std::min(hi_cap, n - 2), 16, 200));
        results.push_back(check_green_identity(op, nl, u, bands, 1e-5, true));
        results.push_back(check_green_identity(op, nl, ubar, bands, 1e-5, false));
    }
    results.push_back(check_comparison(op, nl, ubar, u, Band{0, n - 2}));
    {
        std::vector<double> g(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double r = op.grid().node(i) / cfg.radius;
            g[static_cast<std::size_t>(i)] = r < 0.4 ? 1.0 : (r > 0.6 ? -1.0 : 0.0);
        }
        Field src(op.grid_ptr(), g);
        Field kato_u = op.green_apply(src);
        std::vector<Field> bumps;
        for (int b = 0; b < 50; ++b) {
            Band band = rand_band(n - 2, 14, 200);
            bumps.push_back(make_bump(op.grid_ptr(), band.lo, band.hi));
        }
        results.push_back(check_kato(op, kato_u, src, bumps));
    }
    {
        auto ma = solve_moderate(op, nl, 16.0, martin, cfg.solver_options());
        auto mb = solve_moderate(op, nl, 27.0, martin, cfg.solver_options());
        std::vector<Field> bumps;
        for (int b = 0; b < 50; ++b) {
            Band band = rand_band(n - 2, 14, 200);
            bumps.push_back(make_bump(op.grid_ptr(), band.lo, band.hi));
        }
        results.push_back(check_max_subsolution(op, nl, ma.u, mb.u, bumps));
        results.push_back(check_min_supersolution(op, nl, ma.u, mb.u, bumps));
    }

    io::atomic_write(cfg.out_dir + "/verify.json", io::check_results_json(results, fp));
    std::cout << io::check_results_table(results);
    for (const auto& r : results)
        if (!r.verdict) return kExitNotAdmissible;
    return kExitOk;
}

int run_report(const ExperimentConfig& cfg) {
    std::printf("%-6s %-6s %-14s %-14s %-14s %-14s %-12s\n", "alpha", "p", "ko",
                "ko_refined", "growth", "integral", "admissible");
    bool any_error = false;
    std::string json_rows = "[";
    bool first = true;
    for (double alpha : cfg.report_alphas) {
        for (double p : cfg.report_ps) {
            ConditionReport rep;
            try {
                rep = full_report(BernsteinSpec::stable(alpha), Nonlinearity::power(p),
                                  cfg.condition_options());
            } catch (const std::exception& e) {
                std::fprintf(stderr, "report: alpha=%g p=%g failed: %s\n", alpha, p,
                             e.what());
                any_error = true;
                continue;
            }
            std::printf("%-6g %-6g %-14s %-14s %-14s %-14s %-12s\n", alpha, p,
                        to_string(rep.ko.verdict), to_string(rep.ko_refined.verdict),
                        to_string(rep.growth.verdict),
                        to_string(rep.int_criterion.verdict),
                        rep.admissible ? "yes" : "no");
            if (!first) json_rows += ",";
            first = false;
            json_rows += "{\"alpha\":" + io::fmt17(alpha) + ",\"p\":" + io::fmt17(p) +
                         ",\"admissible\":" + (rep.admissible ? "true" : "false") + "}";
        }
    }
    json_rows += "]";
    io::atomic_write(cfg.out_dir + "/report_sweep.json",
                     "{\"fingerprint\":\"" + cfg.fingerprint() + "\",\"rows\":" +
                         json_rows + "}\n");
    return any_error ? kExitStage : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary blow-up laboratory for subordinate Laplacians on balls"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string rate_field;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", args.out_override, "output directory override");
        sub->add_flag("--no-cache", args.no_cache, "disable the operator cache");
        sub->add_option("--threads", args.threads, "assembly threads (0 = hardware)");
    };
    auto* c_check = app.add_subcommand("check", "admissibility condition suite");
    add_common(c_check);
    auto* c_solve = app.add_subcommand("solve", "full pipeline to the large solution");
    add_common(c_solve);
    auto* c_rate = app.add_subcommand("rate", "fit the blow-up exponent of a stored field");
    add_common(c_rate);
    c_rate->add_option("--field", rate_field, "CSV path (default <out>/u.csv)");
    auto* c_verify = app.add_subcommand("verify", "structural verifier battery");
    add_common(c_verify);
    auto* c_report = app.add_subcommand("report", "(alpha, p) admissibility sweep");
    add_common(c_report);

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        cfg = load_config(args);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (c_check->parsed()) return run_check(cfg);
        if (c_solve->parsed()) return run_solve(cfg);
        if (c_rate->parsed()) return run_rate(cfg, rate_field);
        if (c_verify->parsed()) return run_verify(cfg);
        if (c_report->parsed()) return run_report(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return kExitConfig;
}
