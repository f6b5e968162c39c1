// Command-line driver: run, sweep, compare, adapt-study, replay, oracle.
// Exit codes: 0 ok, 2 config error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "dualview/config.hpp"
#include "dualview/errors.hpp"
#include "dualview/fusion_check.hpp"
#include "dualview/io.hpp"
#include "dualview/pipeline.hpp"

using namespace dualview;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string baseline;
    bool literal_fusion_cov = false;
    std::string convention;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool config_required = true) {
    auto* opt = cmd->add_option("--config", a.config, "run configuration (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--seed", a.seed, "override the scenario seed");
    cmd->add_option("--out", a.out, "output directory (default: config output_dir)");
    cmd->add_option("--baseline", a.baseline, "fusion or switching")->check(CLI::IsMember({"fusion", "switching"}));
    cmd->add_flag("--literal-fusion-cov", a.literal_fusion_cov, "use the literal fused covariance A^-1 (c = 1)");
    cmd->add_option("--convention", a.convention, "covariance layout in the config: minimal or padded")
        ->check(CLI::IsMember({"minimal", "padded"}));
}

RunConfig load(const CommonArgs& a) {
    std::optional<Convention> conv;
    if (!a.convention.empty()) conv = parse_convention(a.convention);
    RunConfig cfg = load_run_config(a.config, conv);
    if (a.seed) cfg.scenario.seed = *a.seed;
    if (!a.out.empty()) cfg.output_dir = a.out;
    if (a.baseline == "switching") cfg.baseline = Baseline::Switching;
    if (a.baseline == "fusion") cfg.baseline = Baseline::Fusion;
    if (a.literal_fusion_cov) cfg.fusion.normalization = 1.0;
    return cfg;
}

void print_metrics(const RunResult& r) {
    std::printf("%-9s %12s %12s %12s %12s %10s %8s\n", "track", "rmse_pos", "rmse_rot", "rmse_vel", "rmse_angvel",
                "nees", "updates");
    for (const auto& [name, m] : r.metrics) {
        std::printf("%-9s %12.6g %12.6g %12.6g %12.6g %10.4g %8.3g\n", name.c_str(), m.rmse_position,
                    m.rmse_rotation, m.rmse_velocity, m.rmse_angular_velocity, m.nees_mean, m.update_rate);
    }
}

RunResult run_configured(const RunConfig& cfg, const ScenarioData& data) {
    return cfg.baseline == Baseline::Switching ? run_switching_baseline(cfg, data) : run_fusion_pipeline(cfg, data);
}

int cmd_run(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const RunResult r = run_configured(cfg, generate_scenario(cfg.scenario));
    write_run_outputs(cfg.output_dir, r);
    print_metrics(r);
    std::printf("outputs written to %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_compare(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const ScenarioData data = generate_scenario(cfg.scenario);
    RunResult r = run_fusion_pipeline(cfg, data);
    const RunResult sw = run_switching_baseline(cfg, data);
    r.baseline = sw.baseline;
    r.metrics["baseline"] = sw.metrics.at("baseline");
    write_run_outputs(cfg.output_dir, r);
    print_metrics(r);
    std::printf("outputs written to %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_sweep(const CommonArgs& a, int seeds, std::uint64_t first_seed) {
    RunConfig cfg = load(a);
    std::string csv = "seed,track,rmse_pos,rmse_rot,rmse_vel,rmse_angvel,nees_mean\n";
    for (int i = 0; i < seeds; ++i) {
        cfg.scenario.seed = first_seed + static_cast<std::uint64_t>(i);
        const RunResult r = run_configured(cfg, generate_scenario(cfg.scenario));
        for (const auto& [name, m] : r.metrics) {
            csv += std::to_string(cfg.scenario.seed) + ',' + name + ',' + format_double(m.rmse_position) + ',' +
                   format_double(m.rmse_rotation) + ',' + format_double(m.rmse_velocity) + ',' +
                   format_double(m.rmse_angular_velocity) + ',' + format_double(m.nees_mean) + '\n';
        }
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file((std::filesystem::path(cfg.output_dir) / "sweep.csv").string(), csv);
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_adapt_study(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    std::printf("%-7s %12s %12s %14s\n", "case", "rmse_pos", "rmse_vel", "var(v_fused)");
    for (const auto& c : run_adaptation_study(cfg)) {
        std::printf("%-7s %12.6g %12.6g %14.6g\n", c.label.c_str(), c.fused.rmse_position, c.fused.rmse_velocity,
                    c.fused_velocity_variance);
    }
    return 0;
}

int cmd_replay(const CommonArgs& a, const std::string& log) {
    const RunConfig cfg = load(a);
    const ScenarioData data = scenario_from_events(cfg, read_measurement_log(log));
    const RunResult r = run_configured(cfg, data);
    write_run_outputs(cfg.output_dir, r);
    std::printf("replayed %zu measurements over %d steps; outputs written to %s\n", r.events.size(),
                cfg.scenario.steps, cfg.output_dir.c_str());
    return 0;
}

int cmd_oracle(const FusionCheckOptions& opts) {
    const FusionCheckReport rep = run_fusion_cross_check(opts);
    std::printf("instances            %d\n", rep.instances);
    std::printf("oracle failures      %d\n", rep.oracle_failures);
    std::printf("max error (single)   %.3e\n", rep.max_error_single);
    std::printf("mean error (single)  %.3e\n", rep.mean_error_single);
    std::printf("max error (iterated) %.3e\n", rep.max_error_iterated);
    std::printf("%s\n", rep.passed ? "PASS" : "FAIL");
    return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-camera pose tracking with adaptive Lie-group filters and correlated fusion"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, compare_args, adapt_args, replay_args;
    auto* run = app.add_subcommand("run", "simulate and run one configuration");
    add_common(run, run_args);

    auto* sweep = app.add_subcommand("sweep", "run a range of seeds and tabulate metrics");
    add_common(sweep, sweep_args);
    int seeds = 10;
    std::uint64_t first_seed = 1;
    sweep->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
    sweep->add_option("--first-seed", first_seed, "first seed");

    auto* compare = app.add_subcommand("compare", "fusion against the switching baseline on the same data");
    add_common(compare, compare_args);

    auto* adapt = app.add_subcommand("adapt-study", "tuned vs. f = 1 vs. f = 0.8 on the same data");
    add_common(adapt, adapt_args);

    auto* replay = app.add_subcommand("replay", "run the filters on a recorded measurement log");
    add_common(replay, replay_args);
    std::string log;
    replay->add_option("--log", log, "measurement log CSV")->required();

    auto* oracle = app.add_subcommand("oracle", "cross-check closed-form fusion against a brute-force minimizer");
    FusionCheckOptions oracle_opts;
    oracle->add_option("--seed", oracle_opts.seed, "seed");
    oracle->add_option("--instances", oracle_opts.instances, "number of random problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_args);
        if (*sweep) return cmd_sweep(sweep_args, seeds, first_seed);
        if (*compare) return cmd_compare(compare_args);
        if (*adapt) return cmd_adapt_study(adapt_args);
        if (*replay) return cmd_replay(replay_args, log);
        if (*oracle) return cmd_oracle(oracle_opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const ContractViolation& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitConfig;
    }
    return 0;
}
