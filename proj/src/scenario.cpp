#include "dualview/scenario.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void require_psd(const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw ConfigError(std::string(name) + " must be a finite symmetric matrix");
    }
    if (m.isZero(0.0)) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw ConfigError(std::string(name) + " must be positive semidefinite");
    }
}

void validate_availability(const AvailabilityModel& a, int steps, const char* name) {
    if (!(a.rate >= 0.0 && a.rate <= 1.0)) {
        throw ConfigError(std::string(name) + " availability rate must lie in [0, 1]");
    }
    if (a.mode == AvailabilityModel::Mode::Replay && static_cast<int>(a.mask.size()) != steps) {
        throw ConfigError(std::string(name) + " replay mask must have one entry per step");
    }
}

double burst_factor(const std::vector<BurstWindow>& bursts, int step, Source source) {
    double factor = 1.0;
    for (const auto& b : bursts) {
        const bool applies = source == Source::Hand ? b.hand : b.base;
        if (applies && step >= b.start && step < b.end) factor *= b.factor;
    }
    return factor;
}

}  // namespace

const char* to_string(Source s) { return s == Source::Hand ? "hand" : "base"; }

std::vector<double> ArmMotion::at(double t) const {
    std::vector<double> theta = theta0;
    for (std::size_t i = 0; i < theta.size() && i < amplitude.size(); ++i) {
        theta[i] += amplitude[i] * std::sin(kTwoPi * frequency_hz * t);
    }
    return theta;
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (steps <= 0) throw ConfigError("steps must be positive");
    require_psd(q_nw, "q_nw");
    require_psd(q_nv, "q_nv");
    require_psd(r_true_hand, "r_true_hand");
    require_psd(r_true_base, "r_true_base");
    validate_availability(avail_hand, steps, "hand");
    validate_availability(avail_base, steps, "base");
    for (const auto& b : bursts) {
        if (b.end < b.start || !(b.factor > 0.0)) throw ConfigError("burst windows need start <= end and factor > 0");
    }
    if (arm.theta0.size() != chain.screws.size()) {
        throw ConfigError("arm.theta0 must have one entry per joint");
    }
    if (!arm.amplitude.empty() && arm.amplitude.size() != chain.screws.size()) {
        throw ConfigError("arm.amplitude must be empty or have one entry per joint");
    }
}

std::vector<TargetState> simulate_truth(const ScenarioConfig& cfg) {
    RandomStream rng(cfg.seed, StreamId::Truth);
    Eigen::MatrixXd accel_cov = Eigen::MatrixXd::Zero(6, 6);
    accel_cov.topLeftCorner(3, 3) = cfg.q_nw;
    accel_cov.bottomRightCorner(3, 3) = cfg.q_nv;
    const Eigen::MatrixXd l = psd_cholesky(accel_cov);
    const double sqrt_dt = std::sqrt(cfg.dt);

    std::vector<TargetState> truth;
    truth.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    truth.push_back(cfg.initial_state);
    for (int k = 0; k < cfg.steps; ++k) {
        const TargetState& x = truth.back();
        Eigen::Matrix<double, 6, 1> z;
        for (int i = 0; i < 6; ++i) z(i) = rng.normal();
        StateTangent xi = StateTangent::Zero();
        xi.segment<3>(0) = cfg.dt * x.omega;
        xi.segment<3>(3) = cfg.dt * x.velocity;
        xi.tail<6>() = sqrt_dt * (l * z);
        truth.push_back(x * state_exp(xi));
    }
    return truth;
}

Pose synthesize_measurement(const Pose& truth_pose, const Matrix6& r_true, RandomStream& rng) {
    const Twist6 m = rng.gaussian(r_true);
    return truth_pose * se3_exp(m);
}

std::vector<bool> availability_schedule(const AvailabilityModel& model, int steps, RandomStream& rng) {
    switch (model.mode) {
        case AvailabilityModel::Mode::Always:
            return std::vector<bool>(static_cast<std::size_t>(steps), true);
        case AvailabilityModel::Mode::Replay:
            return model.mask;
        case AvailabilityModel::Mode::Bernoulli: {
            std::vector<bool> mask(static_cast<std::size_t>(steps));
            for (int k = 0; k < steps; ++k) mask[static_cast<std::size_t>(k)] = rng.uniform() < model.rate;
            return mask;
        }
    }
    return {};
}

ScenarioData generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioData data;
    data.truth = simulate_truth(cfg);

    RandomStream hand_avail(cfg.seed, StreamId::HandAvailability);
    RandomStream base_avail(cfg.seed, StreamId::BaseAvailability);
    data.mask_hand = availability_schedule(cfg.avail_hand, cfg.steps, hand_avail);
    data.mask_base = availability_schedule(cfg.avail_base, cfg.steps, base_avail);

    RandomStream hand_noise(cfg.seed, StreamId::HandMeasurement);
    RandomStream base_noise(cfg.seed, StreamId::BaseMeasurement);
    for (int k = 1; k <= cfg.steps; ++k) {
        const double t = k * cfg.dt;
        const Pose& truth_pose = data.truth[static_cast<std::size_t>(k)].pose;
        const Pose z_hand =
            synthesize_measurement(truth_pose, burst_factor(cfg.bursts, k, Source::Hand) * cfg.r_true_hand, hand_noise);
        const Pose z_base =
            synthesize_measurement(truth_pose, burst_factor(cfg.bursts, k, Source::Base) * cfg.r_true_base, base_noise);

        if (data.mask_hand[static_cast<std::size_t>(k - 1)]) {
            // what the hand camera sees, then the pseudo-pose rebuilt from arm kinematics
            const std::vector<double> theta = cfg.arm.at(t);
            const Pose t_BE = poe_forward(cfg.chain, theta);
            const Pose tag = hand_tag_observation(t_BE, cfg.extrinsics, z_hand);
            data.events.push_back({k, t, Source::Hand, hand_pseudo_pose(t_BE, cfg.extrinsics, tag)});
        }
        if (data.mask_base[static_cast<std::size_t>(k - 1)]) {
            const Pose tag = base_tag_observation(cfg.extrinsics, z_base);
            data.events.push_back({k, t, Source::Base, base_pseudo_pose(cfg.extrinsics, tag)});
        }
    }
    return data;
}

TargetState sample_initial_estimate(const TargetState& truth0, const Matrix12& p0, RandomStream& rng) {
    const StateTangent zeta = rng.gaussian(p0);
    return truth0 * state_exp(-zeta);
}

}  // namespace dualview
