#pragma once

// Pose-level simulator for the dual-camera tracking scenarios: ground truth
// from a noisy constant-velocity model, noisy pseudo-pose measurements routed
// through the camera/kinematic chains, and per-camera availability masks.

#include <optional>
#include <string>
#include <vector>

#include "dualview/kinematics.hpp"
#include "dualview/rng.hpp"
#include "dualview/state.hpp"

namespace dualview {

enum class Source { Hand, Base };

const char* to_string(Source s);

struct AvailabilityModel {
    enum class Mode { Always, Bernoulli, Replay };
    Mode mode = Mode::Always;
    double rate = 1.0;
    /// Replay mask, one entry per step 1..steps.
    std::vector<bool> mask;

    static AvailabilityModel always() { return {}; }
    static AvailabilityModel bernoulli(double rate) { return {Mode::Bernoulli, rate, {}}; }
    static AvailabilityModel replay(std::vector<bool> mask) { return {Mode::Replay, 1.0, std::move(mask)}; }
};

/// Measurement-noise inflation over steps [start, end). Stand-in for the
/// disturbance the moving arm causes in tag detection.
struct BurstWindow {
    int start = 0;
    int end = 0;
    double factor = 10.0;
    bool hand = true;
    bool base = false;
};

/// theta(t) = theta0 + amplitude * sin(2 pi f t), per joint.
struct ArmMotion {
    std::vector<double> theta0;
    std::vector<double> amplitude;
    double frequency_hz = 0.0;

    std::vector<double> at(double t) const;
};

struct ScenarioConfig {
    double dt = 0.066;
    int steps = 500;
    TargetState initial_state;
    Matrix3 q_nw = Matrix3::Zero();
    Matrix3 q_nv = Matrix3::Zero();
    Matrix6 r_true_hand = Matrix6::Zero();
    Matrix6 r_true_base = Matrix6::Zero();
    AvailabilityModel avail_hand;
    AvailabilityModel avail_base;
    std::uint64_t seed = 1;
    std::vector<BurstWindow> bursts;
    KinematicChain chain = synthetic_six_dof_chain();
    ArmMotion arm;
    ExtrinsicSet extrinsics;

    /// Throws ConfigError on dt <= 0, steps <= 0, non-PSD covariances, rates outside [0, 1],
    /// replay masks of the wrong length or arm vectors that do not match the chain.
    void validate() const;
};

struct MeasurementEvent {
    int step = 0;
    double time = 0.0;
    Source source = Source::Base;
    /// Pseudo-pose of the target in the base frame.
    Pose pose;
};

struct ScenarioData {
    /// truth[k] for k = 0..steps.
    std::vector<TargetState> truth;
    /// mask[k - 1] tells whether the source delivered a measurement at step k.
    std::vector<bool> mask_hand;
    std::vector<bool> mask_base;
    /// Ordered by step, hand before base within a step.
    std::vector<MeasurementEvent> events;
};

/// X(k+1) = X(k) exp(dt f(X(k)) + sqrt(dt) w(k)), w ~ N(0, blockdiag(0_6, q_nw, q_nv)).
std::vector<TargetState> simulate_truth(const ScenarioConfig& cfg);

/// truth * exp(m), m ~ N(0, r_true).
Pose synthesize_measurement(const Pose& truth_pose, const Matrix6& r_true, RandomStream& rng);

std::vector<bool> availability_schedule(const AvailabilityModel& model, int steps, RandomStream& rng);

/// Full scenario. Every step draws measurement noise for both sources whether
/// or not the sample is delivered, so masks never shift the noise sequence.
ScenarioData generate_scenario(const ScenarioConfig& cfg);

/// Initial filter mean drawn as truth0 * exp(-zeta), zeta ~ N(0, p0).
TargetState sample_initial_estimate(const TargetState& truth0, const Matrix12& p0, RandomStream& rng);

}  // namespace dualview
