// aoi: command-line front end for the M/G/1/1 probabilistic-preemption
// age-of-information toolkit.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage or parse error,
// 3 numeric domain or quadrature error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/kernels.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/report.hpp"
#include "aoi/simulator.hpp"
#include "aoi/validation.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Raised with the name of the quantity whose evaluation failed.
struct QuantityError {
    std::string quantity;
    std::string message;
    int code;
};

template <class F>
auto compute(const std::string& quantity, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const aoi::ConfigError& e) {
        throw QuantityError{quantity, e.what(), kExitUsage};
    } catch (const aoi::ParseError& e) {
        throw QuantityError{quantity, e.what(), kExitUsage};
    } catch (const aoi::Error& e) {
        throw QuantityError{quantity, e.what(), kExitNumeric};
    }
}

struct SystemArgs {
    double lambda = 1.0;
    double theta = 1.0;
    std::string dist;
};

void add_system_options(CLI::App* cmd, SystemArgs& args, bool with_theta) {
    cmd->add_option("--lambda", args.lambda, "Arrival rate (> 0)")->required();
    if (with_theta) cmd->add_option("--theta", args.theta, "Preemption probability in [0, 1]")->required();
    cmd->add_option("--dist", args.dist,
                    "Service law: exp:rate=F | gamma:shape=F,rate=F | det:value=F | uniform:a=F,b=F | "
                    "lognormal:alpha=F,omega=F")
        ->required();
}

aoi::SystemConfig make_system(const SystemArgs& args, double theta) {
    return compute("configuration", [&] {
        return aoi::SystemConfig(args.lambda, theta, aoi::parse_distribution(args.dist));
    });
}

nlohmann::json config_echo(const aoi::SystemConfig& cfg) {
    nlohmann::json j = aoi::report::to_json(cfg);
    j["quad_rel_tol"] = aoi::quad::default_tolerance().rel;
    j["kernel_backend"] = std::string(aoi::kernels::to_string(aoi::kernels::active()));
    return j;
}

void emit_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_analyze(const SystemArgs& args, int moments, bool csv) {
    const aoi::SystemConfig cfg = make_system(args, args.theta);
    const aoi::AnalyticModel model = compute("region of convergence", [&] { return aoi::AnalyticModel(cfg); });

    nlohmann::json results;
    results["avg_aoi"] = aoi::report::round_sig(compute("average AoI", [&] { return aoi::average_aoi(cfg); }));
    results["avg_paoi"] =
        aoi::report::round_sig(compute("average peak AoI", [&] { return aoi::average_paoi(cfg); }));
    results["mean_interdeparture"] = aoi::report::round_sig(
        compute("mean interdeparture time", [&] { return aoi::mean_interdeparture(cfg); }));
    results["delivery_prob"] = aoi::report::round_sig(model.delivery_prob());
    results["mean_system_time"] =
        aoi::report::round_sig(compute("mean system time", [&] { return model.mean_system_time(); }));
    results["roc_sup"] = aoi::report::round_sig(model.roc_sup());
    for (int m = 1; m <= moments; ++m) {
        const std::string k = std::to_string(m);
        results["aoi_moment_" + k] = aoi::report::round_sig(
            compute("AoI moment " + k, [&] { return aoi::aoi_moment(model, m); }));
        results["paoi_moment_" + k] = aoi::report::round_sig(
            compute("peak AoI moment " + k, [&] { return aoi::paoi_moment(model, m); }));
    }

    if (csv) {
        aoi::report::write_flat_csv(std::cout, results);
        return 0;
    }
    nlohmann::json config = config_echo(cfg);
    config["moments"] = moments;
    emit_json(aoi::report::envelope("analyze", config, results));
    return 0;
}

struct SimulateArgs {
    std::uint64_t deliveries = 1'000'000;
    std::uint64_t warmup = 1'000;
    std::uint64_t seed = 1;
    std::uint32_t reps = 1;
    std::string dump;
};

int cmd_simulate(const SystemArgs& args, const SimulateArgs& sim, bool csv) {
    const aoi::SystemConfig cfg = make_system(args, args.theta);
    const aoi::SimConfig sc{.system = cfg,
                            .deliveries = sim.deliveries,
                            .warmup_deliveries = sim.warmup,
                            .seed = sim.seed,
                            .replications = sim.reps,
                            .keep_trace = !sim.dump.empty()};
    const aoi::SimResult res = compute("simulation", [&] { return aoi::run(sc); });
    if (!sim.dump.empty()) {
        std::ofstream out(sim.dump);
        if (!out) throw QuantityError{"trace dump", "cannot open '" + sim.dump + "' for writing", kExitUsage};
        aoi::write_trace_csv(out, res.trace);
    }
    const nlohmann::json results = aoi::report::to_json(res.summary);
    if (csv) {
        aoi::report::write_flat_csv(std::cout, results.flatten());
        return 0;
    }
    nlohmann::json config = config_echo(cfg);
    config["deliveries"] = sim.deliveries;
    config["warmup_deliveries"] = sim.warmup;
    config["seed"] = sim.seed;
    config["replications"] = sim.reps;
    config["se_batches"] = aoi::default_batches();
    emit_json(aoi::report::envelope("simulate", config, results));
    return 0;
}

struct SweepArgs {
    int grid = 101;
    bool with_sim = false;
    std::uint64_t sim_deliveries = 100'000;
    std::uint64_t seed = 1;
    std::string output;
};

int cmd_sweep(const SystemArgs& args, const SweepArgs& sw) {
    const aoi::SystemConfig probe = make_system(args, 0.0);
    const auto grid = compute("theta grid", [&] { return aoi::uniform_theta_grid(sw.grid); });
    std::optional<aoi::SimulationOptions> sim;
    if (sw.with_sim) sim = aoi::SimulationOptions{.deliveries = sw.sim_deliveries, .seed = sw.seed};
    const auto rows =
        compute("theta sweep", [&] { return aoi::sweep_theta(probe.lambda, probe.service, grid, sim); });
    for (const auto& r : rows)
        if (!r.ok()) std::cerr << "warning: theta=" << r.theta << ": " << *r.error << '\n';
    if (sw.output.empty() || sw.output == "-") {
        aoi::report::write_sweep_csv(std::cout, rows, sw.with_sim);
    } else {
        std::ofstream out(sw.output);
        if (!out) throw QuantityError{"sweep output", "cannot open '" + sw.output + "' for writing", kExitUsage};
        aoi::report::write_sweep_csv(out, rows, sw.with_sim);
    }
    return 0;
}

int cmd_optimize(const SystemArgs& args, const std::string& objective, int grid) {
    const aoi::SystemConfig probe = make_system(args, 0.0);
    const aoi::Objective obj = objective == "paoi" ? aoi::Objective::paoi : aoi::Objective::aoi;
    const aoi::Optimum o =
        compute("optimal theta", [&] { return aoi::optimize_theta(probe.lambda, probe.service, obj, grid); });
    nlohmann::json config = {{"lambda", probe.lambda}, {"dist", probe.service.spec()}, {"objective", objective}};
    emit_json(aoi::report::envelope("optimize", config, aoi::report::to_json(o)));
    return 0;
}

int cmd_validate(const std::string& level, double scale, std::uint64_t seed) {
    aoi::validation::Options opts;
    opts.level = level == "full" ? aoi::validation::Level::full : aoi::validation::Level::quick;
    opts.tolerance_scale = scale;
    opts.seed = seed;
    const aoi::validation::Report report =
        compute("validation", [&] { return aoi::validation::run(opts); });
    aoi::validation::print(std::cout, report);
    if (const auto* fail = report.first_failure()) {
        char line[512];
        std::snprintf(line, sizeof line, "first failure: %s (observed %.12g, expected %.12g, tolerance %.3g)\n",
                      fail->name.c_str(), fail->observed, fail->expected, fail->tolerance);
        std::cerr << line;
        return kExitValidation;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information toolkit for the M/G/1/1 queue with probabilistic preemption"};
    app.require_subcommand(1);
    app.set_version_flag("--version", aoi::report::kToolVersion);

    SystemArgs sys;
    bool csv = false;
    bool json = false;

    auto* analyze = app.add_subcommand("analyze", "Closed-form AoI / peak-AoI statistics");
    add_system_options(analyze, sys, true);
    int moments = 0;
    analyze->add_option("--moments", moments, "Also report raw moments 1..m (m <= 3)")
        ->check(CLI::Range(0, 3));
    analyze->add_flag("--json", json, "JSON output (default)");
    analyze->add_flag("--csv", csv, "quantity,value CSV output");

    auto* simulate = app.add_subcommand("simulate", "Discrete-event simulation");
    add_system_options(simulate, sys, true);
    SimulateArgs sim;
    simulate->add_option("--deliveries", sim.deliveries, "Deliveries per replication");
    simulate->add_option("--warmup", sim.warmup, "Warm-up deliveries discarded per replication");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--reps", sim.reps, "Independent replications")->check(CLI::PositiveNumber);
    simulate->add_option("--dump", sim.dump, "Write per-delivery records to this CSV file");
    simulate->add_flag("--json", json, "JSON output (default)");
    simulate->add_flag("--csv", csv, "quantity,value CSV output");

    auto* sweep = app.add_subcommand("sweep", "Average AoI / peak AoI over a theta grid (CSV)");
    add_system_options(sweep, sys, false);
    SweepArgs sw;
    sweep->add_option("--grid", sw.grid, "Number of equally spaced theta values in [0, 1]")
        ->check(CLI::Range(2, 1'000'000));
    sweep->add_flag("--with-sim", sw.with_sim, "Add simulation columns");
    sweep->add_option("--sim-deliveries", sw.sim_deliveries, "Deliveries per simulated row");
    sweep->add_option("--seed", sw.seed, "Random seed for simulated rows");
    sweep->add_option("-o,--output", sw.output, "Output CSV file (default stdout)");

    auto* optimize = app.add_subcommand("optimize", "Minimize the average AoI or peak AoI over theta");
    add_system_options(optimize, sys, false);
    std::string objective = "aoi";
    int opt_grid = 101;
    optimize->add_option("--objective", objective, "aoi or paoi")->check(CLI::IsMember({"aoi", "paoi"}));
    optimize->add_option("--grid", opt_grid, "Coarse grid size")->check(CLI::Range(2, 1'000'000));

    auto* validate = app.add_subcommand("validate", "Run the analytic and simulation self-checks");
    std::string level = "quick";
    double tol_scale = 1.0;
    std::uint64_t val_seed = 20240601;
    validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    validate->add_option("--seed", val_seed, "Seed for the simulation checks");
    validate->add_option("--tolerance-scale", tol_scale)->group("");  // test hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (csv && json) {
        std::cerr << "error: --json and --csv are exclusive\n";
        return kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(sys, moments, csv);
        if (*simulate) return cmd_simulate(sys, sim, csv);
        if (*sweep) return cmd_sweep(sys, sw);
        if (*optimize) return cmd_optimize(sys, objective, opt_grid);
        if (*validate) return cmd_validate(level, tol_scale, val_seed);
    } catch (const QuantityError& e) {
        std::cerr << "error: " << e.quantity << ": " << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
