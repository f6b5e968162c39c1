#pragma once

// Adaptive extended Kalman filter on SE(3) x R^3 x R^3 with pose measurements
// on SE(3). The estimate is the concentrated Gaussian X = mean * exp(zeta),
// zeta ~ N(0, cov), zeta in the 12-dim minimal tangent.

#include <optional>

#include "dualview/state.hpp"

namespace dualview {

using Matrix12x6 = Eigen::Matrix<double, 12, 6>;
using Matrix6x12 = Eigen::Matrix<double, 6, 12>;

/// Upper quantile of chi-square with 6 dof at 0.999.
inline constexpr double kChi2Dof6P999 = 22.457744484825323;

struct StateEstimate {
    TargetState mean;
    Matrix12 cov = Matrix12::Identity();
};

struct NoiseConfig {
    /// Continuous-time process noise in the 12-dim tangent; the prediction uses dt * q.
    Matrix12 q = Matrix12::Zero();
    /// Measurement noise on the SE(3) tangent of the pose measurement.
    Matrix6 r = Matrix6::Identity();
    double f_q = 1.0;
    double f_r = 1.0;

    /// q = blockdiag(0_6, q_nw, q_nv).
    static NoiseConfig fromBlocks(const Matrix3& q_nw, const Matrix3& q_nv, const Matrix6& r, double f_q, double f_r);
    /// Throws ContractViolation when a forgetting factor is outside [0, 1] or a matrix is asymmetric/indefinite.
    void validate() const;
};

struct FilterOptions {
    /// false runs the constant-noise EKF: adapt_noise is never applied.
    bool adaptive = true;
    /// Mahalanobis gate on the innovation (off by default).
    bool gate = false;
    double gate_threshold = kChi2Dof6P999;
    /// R adaptation adds H P H^T with P = P(k|k-1) (default) or, when set, P(k|k).
    bool r_adaptation_posterior = false;
};

struct PredictRecord {
    StateTangent f_bar = StateTangent::Zero();
    Matrix12 f_matrix = Matrix12::Identity();
    /// dt * q as used in this prediction.
    Matrix12 q_discrete = Matrix12::Zero();
};

struct UpdateRecord {
    Matrix12x6 gain = Matrix12x6::Zero();
    Twist6 innovation = Twist6::Zero();
    Twist6 residual = Twist6::Zero();
    Matrix6x12 h_matrix = Matrix6x12::Zero();
    StateTangent f_bar = StateTangent::Zero();
    Matrix12 f_matrix = Matrix12::Identity();
    Matrix6 innovation_cov = Matrix6::Zero();
};

enum class MeasurementStatus {
    None,              // no measurement this step
    Applied,
    RejectedSingular,  // innovation covariance ill-conditioned (cond > 1e12)
    RejectedGate,
};

struct PredictResult {
    StateEstimate estimate;
    PredictRecord record;
};

struct UpdateResult {
    StateEstimate estimate;
    MeasurementStatus status = MeasurementStatus::None;
    /// Present only when status == Applied.
    std::optional<UpdateRecord> record;
};

struct StepResult {
    StateEstimate estimate;
    NoiseConfig noise;
    PredictRecord prediction;
    MeasurementStatus status = MeasurementStatus::None;
    std::optional<UpdateRecord> update;
};

/// H = [I6 0]: the measurement is the pose block.
Matrix6x12 measurement_jacobian();

/// Constant-velocity prediction. Throws ContractViolation for dt <= 0 and
/// NumericalFailure when the propagated covariance is not PSD.
PredictResult predict(const StateEstimate& est, const NoiseConfig& noise, double dt);

UpdateResult update(const StateEstimate& prior, const Pose& z, const NoiseConfig& noise,
                    const FilterOptions& options = {});

/// vee(log(pose(mean)^-1 z)).
Twist6 residual(const StateEstimate& posterior, const Pose& z);

/// Exponentially weighted Q/R re-estimation from one completed update.
NoiseConfig adapt_noise(const NoiseConfig& noise, const UpdateRecord& rec, const Matrix12& p_prior);

/// predict, then update + adapt when a measurement is present and accepted.
/// Without a measurement the posterior is the prior and the noise is unchanged.
StepResult step(const StateEstimate& est, const NoiseConfig& noise, double dt, const std::optional<Pose>& z,
                const FilterOptions& options = {});

}  // namespace dualview
