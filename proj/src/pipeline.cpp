#include "dualview/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

struct StepMeasurements {
    std::vector<std::optional<Pose>> hand;
    std::vector<std::optional<Pose>> base;
};

StepMeasurements index_events(const ScenarioData& data, int steps) {
    StepMeasurements m;
    m.hand.resize(static_cast<std::size_t>(steps) + 1);
    m.base.resize(static_cast<std::size_t>(steps) + 1);
    for (const auto& e : data.events) {
        if (e.step < 1 || e.step > steps) {
            throw ConfigError("measurement event at step " + std::to_string(e.step) + " is outside 1.." +
                              std::to_string(steps));
        }
        auto& slot = e.source == Source::Hand ? m.hand[static_cast<std::size_t>(e.step)]
                                              : m.base[static_cast<std::size_t>(e.step)];
        if (slot) {
            throw ConfigError("duplicate " + std::string(to_string(e.source)) + " measurement at step " +
                              std::to_string(e.step));
        }
        slot = e.pose;
    }
    return m;
}

void count_status(EventCounts& c, MeasurementStatus s) {
    if (s == MeasurementStatus::Applied) ++c.applied;
    else if (s == MeasurementStatus::RejectedSingular || s == MeasurementStatus::RejectedGate) ++c.rejected;
}

int count_generated(const ScenarioData& data, Source src) {
    int n = 0;
    for (const auto& e : data.events) n += e.source == src ? 1 : 0;
    return n;
}

void check_conservation(const RunResult& r) {
    if (!r.hand_counts.conserved() || !r.base_counts.conserved()) {
        throw std::logic_error("measurement event counts are not conserved");
    }
}

std::vector<TargetState> tail(const std::vector<TargetState>& v) { return {v.begin() + 1, v.end()}; }
std::vector<StateEstimate> tail(const std::vector<StateEstimate>& v) { return {v.begin() + 1, v.end()}; }

RunMetrics score(const std::vector<StateEstimate>& track, const std::vector<TargetState>& truth, int applied,
                 int steps) {
    RunMetrics m = compute_metrics(tail(track), tail(truth));
    if (applied >= 0) m.update_rate = static_cast<double>(applied) / steps;
    return m;
}

NumericalFailure at_step(int k, const NumericalFailure& e) {
    return NumericalFailure("step " + std::to_string(k) + ": " + e.what());
}

struct InitialEstimates {
    StateEstimate hand;
    StateEstimate base;
};

InitialEstimates initial_estimates(const RunConfig& cfg, const ScenarioData& data) {
    InitialEstimates init;
    init.hand.cov = cfg.p0;
    init.base.cov = cfg.p0;
    if (data.truth.empty()) {
        init.hand.mean = cfg.scenario.initial_state;
        init.base.mean = cfg.scenario.initial_state;
        return init;
    }
    // independent draws: the filters start with uncorrelated errors, matching P_bh(0) = 0
    RandomStream hand_rng(cfg.scenario.seed, StreamId::HandInitial);
    RandomStream base_rng(cfg.scenario.seed, StreamId::BaseInitial);
    init.hand.mean = sample_initial_estimate(data.truth.front(), cfg.p0, hand_rng);
    init.base.mean = sample_initial_estimate(data.truth.front(), cfg.p0, base_rng);
    return init;
}

}  // namespace

ScenarioData scenario_from_events(const RunConfig& cfg, std::vector<MeasurementEvent> events) {
    const int steps = cfg.scenario.steps;
    ScenarioData data;
    data.events = std::move(events);
    const StepMeasurements m = index_events(data, steps);
    data.mask_hand.resize(static_cast<std::size_t>(steps));
    data.mask_base.resize(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) {
        data.mask_hand[static_cast<std::size_t>(k - 1)] = m.hand[static_cast<std::size_t>(k)].has_value();
        data.mask_base[static_cast<std::size_t>(k - 1)] = m.base[static_cast<std::size_t>(k)].has_value();
    }
    return data;
}

RunResult run_fusion_pipeline(const RunConfig& cfg) { return run_fusion_pipeline(cfg, generate_scenario(cfg.scenario)); }

RunResult run_fusion_pipeline(const RunConfig& cfg, const ScenarioData& data) {
    const int steps = cfg.scenario.steps;
    const double dt = cfg.scenario.dt;
    const StepMeasurements z = index_events(data, steps);

    RunResult r;
    r.dt = dt;
    r.truth = data.truth;
    r.events = data.events;
    r.hand_counts.generated = count_generated(data, Source::Hand);
    r.base_counts.generated = count_generated(data, Source::Base);

    const InitialEstimates init = initial_estimates(cfg, data);
    StateEstimate hand = init.hand;
    StateEstimate base = init.base;
    NoiseConfig noise_hand = cfg.filter_noise_hand;
    NoiseConfig noise_base = cfg.filter_noise_base;
    CrossCovariance cross(cfg.coupling);

    auto record = [&](int k) {
        r.hand.push_back(hand);
        r.base.push_back(base);
        r.cross.push_back(cross.matrix());
        try {
            const FusedEstimate<StateGroup> f = fuse_tracks(base, hand, cross.matrix(), cfg.fusion);
            r.fused.push_back({f.mean, f.cov});
        } catch (const NumericalFailure& e) {
            throw at_step(k, e);
        }
    };

    r.hand_status.push_back(MeasurementStatus::None);
    r.base_status.push_back(MeasurementStatus::None);
    record(0);
    for (int k = 1; k <= steps; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            const StepResult sh = step(hand, noise_hand, dt, z.hand[idx], cfg.filter_options);
            const StepResult sb = step(base, noise_base, dt, z.base[idx], cfg.filter_options);
            cross.advance(FilterStepRecord::from(sb), FilterStepRecord::from(sh));
            hand = sh.estimate;
            base = sb.estimate;
            noise_hand = sh.noise;
            noise_base = sb.noise;
            r.hand_status.push_back(sh.status);
            r.base_status.push_back(sb.status);
            count_status(r.hand_counts, sh.status);
            count_status(r.base_counts, sb.status);
        } catch (const NumericalFailure& e) {
            throw at_step(k, e);
        }
        record(k);
    }
    check_conservation(r);

    if (!r.truth.empty()) {
        r.metrics["hand"] = score(r.hand, r.truth, r.hand_counts.applied, steps);
        r.metrics["base"] = score(r.base, r.truth, r.base_counts.applied, steps);
        r.metrics["fused"] = score(r.fused, r.truth, -1, steps);
    }
    return r;
}

RunResult run_switching_baseline(const RunConfig& cfg) {
    return run_switching_baseline(cfg, generate_scenario(cfg.scenario));
}

RunResult run_switching_baseline(const RunConfig& cfg, const ScenarioData& data) {
    const int steps = cfg.scenario.steps;
    const double dt = cfg.scenario.dt;
    const StepMeasurements z = index_events(data, steps);
    const bool hand_first = cfg.switch_preference == SwitchPreference::HandFirst;

    RunResult r;
    r.dt = dt;
    r.truth = data.truth;
    r.events = data.events;
    r.hand_counts.generated = count_generated(data, Source::Hand);
    r.base_counts.generated = count_generated(data, Source::Base);

    // one filter; q is shared, r is kept per source
    StateEstimate est = initial_estimates(cfg, data).base;
    Matrix12 q = cfg.filter_noise_base.q;
    NoiseConfig by_source[2] = {cfg.filter_noise_hand, cfg.filter_noise_base};

    r.baseline.push_back(est);
    int applied = 0;
    for (int k = 1; k <= steps; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const std::optional<Pose>& zh = z.hand[idx];
        const std::optional<Pose>& zb = z.base[idx];
        int chosen = -1;  // 0 hand, 1 base
        if (zh && zb) chosen = hand_first ? 0 : 1;
        else if (zh) chosen = 0;
        else if (zb) chosen = 1;

        NoiseConfig noise = chosen >= 0 ? by_source[chosen] : cfg.filter_noise_base;
        noise.q = q;
        StepResult s;
        try {
            s = step(est, noise, dt, chosen == 0 ? zh : (chosen == 1 ? zb : std::nullopt), cfg.filter_options);
        } catch (const NumericalFailure& e) {
            throw at_step(k, e);
        }
        est = s.estimate;
        q = s.noise.q;
        if (chosen >= 0) by_source[chosen].r = s.noise.r;

        EventCounts& used = chosen == 0 ? r.hand_counts : r.base_counts;
        if (chosen >= 0) count_status(used, s.status);
        if (zh && chosen != 0) ++r.hand_counts.unused;
        if (zb && chosen != 1) ++r.base_counts.unused;
        applied += s.status == MeasurementStatus::Applied ? 1 : 0;
        r.hand_status.push_back(chosen == 0 ? s.status : MeasurementStatus::None);
        r.base_status.push_back(chosen == 1 ? s.status : MeasurementStatus::None);
        r.baseline.push_back(est);
    }
    check_conservation(r);
    if (!r.truth.empty()) {
        r.metrics["baseline"] = score(r.baseline, r.truth, applied, steps);
    }
    return r;
}

std::vector<AdaptationCase> run_adaptation_study(const RunConfig& cfg) {
    const ScenarioData data = generate_scenario(cfg.scenario);
    std::vector<AdaptationCase> out;
    const std::pair<std::string, double> cases[] = {{"tuned", std::nan("")}, {"f=1", 1.0}, {"f=0.8", 0.8}};
    for (const auto& [label, f] : cases) {
        RunConfig c = cfg;
        if (!std::isnan(f)) {
            for (NoiseConfig* n : {&c.filter_noise_hand, &c.filter_noise_base}) {
                n->f_q = f;
                n->f_r = f;
            }
        }
        const RunResult r = run_fusion_pipeline(c, data);
        AdaptationCase ac;
        ac.label = label;
        ac.forgetting = f;
        ac.fused = r.metrics.at("fused");
        ac.fused_velocity_variance = velocity_variance(tail(r.fused));
        out.push_back(ac);
    }
    return out;
}

}  // namespace dualview
