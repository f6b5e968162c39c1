#pragma once

// The augmented group SE(3) x R^3 x R^3 holding target pose, body angular
// velocity and linear velocity. Filtering runs on the 12-dim minimal tangent
// [phi; rho; d_omega; d_vel]. The 15-dim layout [phi; rho; 0; d_omega; d_vel]
// is supported for I/O only.

#include <Eigen/Core>

#include "dualview/lie.hpp"

namespace dualview {

using StateTangent = Eigen::Matrix<double, 12, 1>;
using Matrix12 = Eigen::Matrix<double, 12, 12>;
using PaddedTangent = Eigen::Matrix<double, 15, 1>;
using Matrix15 = Eigen::Matrix<double, 15, 15>;
using Matrix9 = Eigen::Matrix<double, 9, 9>;

struct TargetState {
    Pose pose;
    Vector3 omega = Vector3::Zero();
    Vector3 velocity = Vector3::Zero();

    static TargetState identity() { return {}; }
    /// 9x9 block-diagonal embedding: pose in the upper 4x4, [[I3, omega, v], [0, 1, 0], [0, 0, 1]] below.
    Matrix9 matrix() const;
    static TargetState fromMatrix(const Matrix9& m);

    TargetState inverse() const;
    TargetState operator*(const TargetState& other) const;
};

inline Twist6 pose_block(const StateTangent& xi) { return xi.head<6>(); }

TargetState state_exp(const StateTangent& xi);
StateTangent state_log(const TargetState& x);

/// blockdiag(Ad_pose, I6).
Matrix12 state_adjoint(const TargetState& x);
/// blockdiag(J_r(pose part), I6).
Matrix12 state_right_jacobian(const StateTangent& xi);
Matrix12 state_right_jacobian_inverse(const StateTangent& xi);

PaddedTangent pad_tangent(const StateTangent& xi);
/// Throws ContractViolation when components 7-9 (1-based) are not zero within 1e-12.
StateTangent unpad_tangent(const PaddedTangent& v);

Matrix15 pad_covariance(const Matrix12& p);
/// Drops rows/columns 7-9 (1-based); whatever they hold is discarded.
Matrix12 unpad_covariance(const Matrix15& p);

}  // namespace dualview
