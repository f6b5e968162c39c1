#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualview/config.hpp"
#include "dualview/errors.hpp"
#include "dualview/io.hpp"
#include "dualview/pipeline.hpp"

using namespace dualview;

namespace {

std::string preset(const std::string& name) { return std::string(DUALVIEW_PRESET_DIR) + "/" + name; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json preset_json(const std::string& name) { return nlohmann::json::parse(read_file(preset(name))); }

RunConfig short_config(const std::string& name, int steps) {
    RunConfig cfg = load_run_config(preset(name));
    cfg.scenario.steps = steps;
    return cfg;
}

}  // namespace

TEST(Config, PresetsCarryReferenceParameters) {
    const RunConfig s1 = load_run_config(preset("scenario1.json"));
    const RunConfig s2 = load_run_config(preset("scenario2.json"));
    EXPECT_EQ(s1.scenario.dt, 0.066);
    EXPECT_EQ(s2.scenario.dt, 0.25);
    EXPECT_EQ(s1.p0, Matrix12(1e-2 * Matrix12::Identity()));
    EXPECT_EQ(s1.filter_noise_base.f_q, 0.999);
    EXPECT_EQ(s2.filter_noise_hand.f_q, 0.990);
    EXPECT_EQ(s2.filter_noise_hand.f_r, 0.950);
    EXPECT_EQ(s2.scenario.avail_base.rate, 0.70);
    EXPECT_EQ(s2.scenario.avail_hand.rate, 0.33);
    EXPECT_TRUE((s1.filter_noise_hand.q.block<3, 3>(9, 9)) == Matrix3(1e-2 * Matrix3::Identity()));
    EXPECT_TRUE((s1.filter_noise_hand.q.block<3, 3>(6, 6)) == Matrix3(1e-5 * Matrix3::Identity()));
    EXPECT_EQ(s1.filter_noise_hand.r(0, 0), 1e-6);
    EXPECT_EQ(s1.filter_noise_hand.r(5, 5), 1e-3);
    EXPECT_EQ(s1.scenario.initial_state.velocity.x(), 0.01);
    EXPECT_EQ(s2.scenario.initial_state.velocity.x(), 0.005);
}

TEST(Config, ConventionControlsP0Size) {
    nlohmann::json j = preset_json("scenario1.json");
    j["filter"]["p0"] = {{"diag", std::vector<double>(15, 0.5)}};
    EXPECT_EQ(parse_run_config(j.dump()).p0, Matrix12(0.5 * Matrix12::Identity()));
    EXPECT_THROW(parse_run_config(j.dump(), Convention::Minimal), ConfigError);
    j["filter"]["p0"] = {{"diag", std::vector<double>(12, 0.5)}};
    j["filter"]["convention"] = "minimal";
    EXPECT_EQ(parse_run_config(j.dump()).p0, Matrix12(0.5 * Matrix12::Identity()));
}

TEST(Config, RejectsInvalidDocuments) {
    EXPECT_THROW(parse_run_config("{not json"), ConfigError);
    nlohmann::json j = preset_json("scenario1.json");
    j["schema_version"] = 2;
    EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
    j = preset_json("scenario1.json");
    j["filter"]["hand"]["f_q"] = 1.5;
    EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
    j = preset_json("scenario1.json");
    j["scenario"]["dt"] = -1.0;
    EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
    j = preset_json("scenario1.json");
    j["baseline"] = "other";
    EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
    j = preset_json("scenario1.json");
    j["scenario"].erase("q_nv");
    EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
    EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, MatrixAndPoseForms) {
    nlohmann::json j = preset_json("scenario1.json");
    j["scenario"]["q_nv"] = {{1e-2, 0, 0}, {0, 2e-2, 0}, {0, 0, 3e-2}};
    j["scenario"]["initial_state"] = {{"matrix", {{1, 0, 0, 0.1}, {0, 1, 0, 0.2}, {0, 0, 1, 0.3}, {0, 0, 0, 1}}}};
    const RunConfig c = parse_run_config(j.dump());
    EXPECT_EQ(c.scenario.q_nv(1, 1), 2e-2);
    EXPECT_EQ(c.scenario.initial_state.pose.translation, Vector3(0.1, 0.2, 0.3));
}

TEST(Metrics, PerfectEstimate) {
    std::vector<TargetState> truth(5);
    std::vector<StateEstimate> est(5);
    for (int k = 0; k < 5; ++k) {
        truth[k].pose.translation = Vector3(k, 0, 0);
        est[k].mean = truth[k];
        est[k].cov = 1e-2 * Matrix12::Identity();
    }
    const RunMetrics m = compute_metrics(est, truth);
    EXPECT_EQ(m.rmse_position, 0.0);
    EXPECT_EQ(m.rmse_rotation, 0.0);
    EXPECT_EQ(m.nees_mean, 0.0);
}

TEST(Metrics, ConstantOffset) {
    std::vector<TargetState> truth(4);
    std::vector<StateEstimate> est(4);
    for (auto& e : est) e.mean.pose.translation = Vector3(0.01, 0, 0);
    EXPECT_DOUBLE_EQ(compute_metrics(est, truth).rmse_position, 0.01);
}

TEST(Metrics, SingularCovarianceIsOmitted) {
    std::vector<TargetState> truth(3);
    std::vector<StateEstimate> est(3);
    est[1].cov.setZero();
    const RunMetrics m = compute_metrics(est, truth);
    EXPECT_EQ(m.nees_omitted, 1);
    EXPECT_EQ(m.nees_samples, 2);
    EXPECT_THROW(compute_metrics(est, std::vector<TargetState>(2)), ContractViolation);
}

TEST(Io, MeasurementLogRoundTripIsExact) {
    const RunConfig cfg = short_config("scenario2.json", 60);
    const ScenarioData d = generate_scenario(cfg.scenario);
    const std::string csv = measurement_log_csv(d.events);
    const auto back = parse_measurement_log(csv);
    ASSERT_EQ(back.size(), d.events.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].step, d.events[i].step);
        EXPECT_EQ(back[i].source, d.events[i].source);
        EXPECT_EQ(back[i].pose.matrix(), d.events[i].pose.matrix());
    }
    EXPECT_EQ(measurement_log_csv(back), csv);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Io, MeasurementLogRejectsGarbage) {
    EXPECT_THROW(parse_measurement_log("header\n1,0.1,hand,1,0,0\n"), ConfigError);
    EXPECT_THROW(parse_measurement_log("header\n1,0.1,left,1,0,0,0,0,1,0,0,0,0,1,0\n"), ConfigError);
    EXPECT_THROW(parse_measurement_log("header\n1,0.1,hand,2,0,0,0,0,1,0,0,0,0,1,0\n"), ConfigError);
    EXPECT_THROW(parse_measurement_log("header\n1,0.1,hand,x,0,0,0,0,1,0,0,0,0,1,0\n"), ConfigError);
}

TEST(Io, FormatUsesSeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
}

TEST(Pipeline, OutputsAreByteIdenticalAcrossRuns) {
    const RunConfig cfg = short_config("scenario2.json", 80);
    const auto dir = std::filesystem::temp_directory_path() / "dualview_test_det";
    write_run_outputs((dir / "a").string(), run_fusion_pipeline(cfg));
    write_run_outputs((dir / "b").string(), run_fusion_pipeline(cfg));
    for (const char* f : {"truth.csv", "hand.csv", "base.csv", "fused.csv", "measurements.csv", "metrics.json"}) {
        const std::string a = read_file(dir / "a" / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, read_file(dir / "b" / f)) << f;
    }
    std::filesystem::remove_all(dir);
}

TEST(Pipeline, EventCountsAreConserved) {
    const RunConfig cfg = short_config("scenario2.json", 120);
    const RunResult r = run_fusion_pipeline(cfg);
    EXPECT_TRUE(r.hand_counts.conserved());
    EXPECT_TRUE(r.base_counts.conserved());
    EXPECT_EQ(r.hand_counts.generated + r.base_counts.generated, static_cast<int>(r.events.size()));
    EXPECT_EQ(r.hand.size(), 121u);
    EXPECT_EQ(r.fused.size(), 121u);
}

TEST(Pipeline, JointCovarianceStaysPsdAndFusionLosesNoInformation) {
    for (const char* name : {"scenario1.json", "scenario2.json"}) {
        const RunConfig cfg = short_config(name, 200);
        const RunResult r = run_fusion_pipeline(cfg);
        for (std::size_t k = 0; k < r.fused.size(); ++k) {
            const Matrix24 j = joint_covariance(r.base[k].cov, r.hand[k].cov, r.cross[k]);
            const double lo = Eigen::SelfAdjointEigenSolver<Matrix24>(j).eigenvalues().minCoeff();
            EXPECT_GT(lo, -1e-8) << name << " step " << k;
            const bool both = r.hand_status[k] == MeasurementStatus::Applied &&
                              r.base_status[k] == MeasurementStatus::Applied;
            if (both) {
                const double smaller = std::min(r.hand[k].cov.trace(), r.base[k].cov.trace());
                EXPECT_LE(r.fused[k].cov.trace(), smaller + 1e-9) << name << " step " << k;
            }
        }
    }
}

TEST(Pipeline, FullAvailabilityFusedNoWorseThanBestSource) {
    RunConfig cfg = load_run_config(preset("scenario1.json"));
    for (int seed = 1; seed <= 20; ++seed) {
        cfg.scenario.seed = static_cast<std::uint64_t>(seed);
        const RunResult r = run_fusion_pipeline(cfg);
        const RunMetrics& f = r.metrics.at("fused");
        const RunMetrics& h = r.metrics.at("hand");
        const RunMetrics& b = r.metrics.at("base");
        EXPECT_LE(f.rmse_position, 1.05 * std::min(h.rmse_position, b.rmse_position)) << "seed " << seed;
        EXPECT_LE(f.rmse_rotation, 1.05 * std::min(h.rmse_rotation, b.rmse_rotation)) << "seed " << seed;
    }
}

TEST(Pipeline, ReplayReproducesRun) {
    const RunConfig cfg = short_config("scenario2.json", 100);
    const ScenarioData d = generate_scenario(cfg.scenario);
    const RunResult live = run_fusion_pipeline(cfg, d);
    ScenarioData replay = scenario_from_events(cfg, parse_measurement_log(measurement_log_csv(d.events)));
    replay.truth = d.truth;
    const RunResult again = run_fusion_pipeline(cfg, replay);
    EXPECT_EQ(track_csv(live.fused, cfg.scenario.dt), track_csv(again.fused, cfg.scenario.dt));

    const RunResult blind = run_fusion_pipeline(cfg, scenario_from_events(cfg, d.events));
    EXPECT_TRUE(blind.metrics.empty());
    EXPECT_EQ(blind.fused.size(), 101u);
}

TEST(Pipeline, ReplayRejectsOutOfRangeEvents) {
    const RunConfig cfg = short_config("scenario1.json", 10);
    MeasurementEvent e;
    e.step = 11;
    EXPECT_THROW(scenario_from_events(cfg, {e}), ConfigError);
    e.step = 3;
    EXPECT_THROW(scenario_from_events(cfg, {e, e}), ConfigError);
}

TEST(Switching, BasePreferenceNeverConsumesHandWhenBothPresent) {
    RunConfig cfg = short_config("scenario1.json", 100);
    const RunResult r = run_switching_baseline(cfg);
    EXPECT_EQ(r.hand_counts.applied + r.hand_counts.rejected, 0);
    EXPECT_EQ(r.hand_counts.unused, r.hand_counts.generated);
    EXPECT_TRUE(r.base_counts.conserved());
}

TEST(Switching, DegenerateSwitchIsSingleCameraFilter) {
    RunConfig cfg = short_config("scenario1.json", 100);
    cfg.scenario.avail_hand = AvailabilityModel::bernoulli(0.0);
    const ScenarioData d = generate_scenario(cfg.scenario);
    const RunResult sw = run_switching_baseline(cfg, d);
    const RunResult fused = run_fusion_pipeline(cfg, d);
    ASSERT_EQ(sw.baseline.size(), fused.base.size());
    for (std::size_t k = 0; k < sw.baseline.size(); ++k) {
        EXPECT_EQ(sw.baseline[k].mean.matrix(), fused.base[k].mean.matrix());
        EXPECT_EQ(sw.baseline[k].cov, fused.base[k].cov);
    }
}

TEST(Pipeline, ScenarioTwoEmitsAllFiles) {
    const RunConfig cfg = load_run_config(preset("scenario2.json"));
    const auto dir = std::filesystem::temp_directory_path() / "dualview_test_s2";
    RunResult r = run_fusion_pipeline(cfg);
    r.baseline = run_switching_baseline(cfg).baseline;
    write_run_outputs(dir.string(), r);
    for (const char* f : {"truth.csv", "hand.csv", "base.csv", "fused.csv", "baseline.csv", "measurements.csv",
                          "metrics.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const auto metrics = nlohmann::json::parse(read_file(dir / "metrics.json"));
    EXPECT_TRUE(metrics["metrics"].contains("fused"));
    std::filesystem::remove_all(dir);
}

TEST(AdaptationStudy, ThreeCasesOnSameData) {
    const RunConfig cfg = short_config("scenario2.json", 80);
    const auto cases = run_adaptation_study(cfg);
    ASSERT_EQ(cases.size(), 3u);
    EXPECT_EQ(cases[0].label, "tuned");
    EXPECT_EQ(cases[1].label, "f=1");
    EXPECT_EQ(cases[2].label, "f=0.8");
}
