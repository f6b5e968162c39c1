#pragma once

// End-to-end runs: simulate (or replay) measurements, run the hand and base
// filters, track their cross-covariance, fuse, and score against truth.

#include <map>
#include <string>
#include <vector>

#include "dualview/config.hpp"
#include "dualview/cross_covariance.hpp"
#include "dualview/metrics.hpp"
#include "dualview/scenario.hpp"

namespace dualview {

/// Per-source bookkeeping; generated == applied + rejected + unused after every run.
struct EventCounts {
    int generated = 0;
    int applied = 0;
    int rejected = 0;
    /// Delivered but never offered to a filter (switching baseline only).
    int unused = 0;

    bool conserved() const { return generated == applied + rejected + unused; }
};

struct RunResult {
    double dt = 0.0;
    /// All per-step vectors are indexed by step k = 0..steps. truth is empty for replays.
    std::vector<TargetState> truth;
    std::vector<StateEstimate> hand;
    std::vector<StateEstimate> base;
    std::vector<StateEstimate> fused;
    std::vector<StateEstimate> baseline;
    /// P_bh(k|k).
    std::vector<Matrix12> cross;
    std::vector<MeasurementStatus> hand_status;
    std::vector<MeasurementStatus> base_status;
    std::vector<MeasurementEvent> events;
    /// Keyed by track name: hand, base, fused, baseline. Scored over steps 1..steps.
    std::map<std::string, RunMetrics> metrics;
    EventCounts hand_counts;
    EventCounts base_counts;
};

/// Simulates the configured scenario and runs both filters plus fusion.
/// NumericalFailure is rethrown with the failing step in its message.
RunResult run_fusion_pipeline(const RunConfig& cfg);
/// Same, on pre-generated data. `data.truth` may be empty (no scoring then).
RunResult run_fusion_pipeline(const RunConfig& cfg, const ScenarioData& data);

/// Single filter fed by the preferred source when it has a sample, otherwise the other one.
RunResult run_switching_baseline(const RunConfig& cfg);
RunResult run_switching_baseline(const RunConfig& cfg, const ScenarioData& data);

/// Builds replay data from a measurement log; masks follow the logged events.
/// Throws ConfigError for events beyond cfg.scenario.steps or duplicated (step, source).
ScenarioData scenario_from_events(const RunConfig& cfg, std::vector<MeasurementEvent> events);

struct AdaptationCase {
    std::string label;
    /// Forgetting factor forced on both filters; NaN keeps the configured values.
    double forgetting = 0.0;
    RunMetrics fused;
    double fused_velocity_variance = 0.0;
};

/// Tuned configuration, f = 1 (no adaptation) and f = 0.8, on the same seed.
std::vector<AdaptationCase> run_adaptation_study(const RunConfig& cfg);

}  // namespace dualview
