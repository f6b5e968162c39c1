#pragma once

#include <vector>

#include "dualview/aekf.hpp"

namespace dualview {

struct RunMetrics {
    double rmse_position = 0.0;
    double rmse_rotation = 0.0;
    double rmse_velocity = 0.0;
    double rmse_angular_velocity = 0.0;
    /// Mean pose NEES over the steps where the pose covariance was usable.
    double nees_mean = 0.0;
    int nees_samples = 0;
    int nees_omitted = 0;
    /// Fraction of steps with an applied update; NaN when not meaningful (fused/truth tracks).
    double update_rate = 0.0;
};

/// 6-dof pose NEES eps^T P_pose^-1 eps with eps = vee(log(mean^-1 truth)).
/// Returns false when the pose block is not positive definite or has cond > 1e12.
bool pose_nees(const StateEstimate& est, const TargetState& truth, double& nees);

/// Errors over paired sequences of equal length. Throws ContractViolation otherwise.
RunMetrics compute_metrics(const std::vector<StateEstimate>& estimates, const std::vector<TargetState>& truth);

/// Sum over the three axes of the sample variance of the estimated linear velocity.
double velocity_variance(const std::vector<StateEstimate>& estimates);

}  // namespace dualview
