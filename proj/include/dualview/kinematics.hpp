#pragma once

// Product-of-exponentials forward kinematics and the pseudo-pose measurement
// chains of the eye-in-hand and eye-to-hand cameras.

#include <span>
#include <vector>

#include "dualview/lie.hpp"

namespace dualview {

/// Revolute joint: unit axis direction and any point on the axis.
class JointScrew {
public:
    /// Throws ContractViolation unless |axis| = 1 within 1e-10.
    JointScrew(const Vector3& axis, const Vector3& point_on_axis);
    /// From a raw twist [w; v] with |w| = 1; the stored point is the one closest to the origin.
    static JointScrew fromTwist(const Twist6& twist);

    const Vector3& axis() const { return axis_; }
    const Vector3& point() const { return point_; }
    /// [w; -w x q]
    Twist6 twist() const;

private:
    Vector3 axis_;
    Vector3 point_;
};

struct KinematicChain {
    std::vector<JointScrew> screws;
    /// End-effector pose at theta = 0.
    Pose home;
};

/// Constant calibration transforms of both camera chains.
struct ExtrinsicSet {
    Pose t_EC_H;  // end effector -> hand camera
    Pose t_BC_B;  // base -> base camera
    Pose t_AH_G;  // hand tag -> grasp frame
    Pose t_AB_G;  // base tag -> grasp frame
};

/// T_BE(theta) = exp(zeta_1 theta_1) ... exp(zeta_n theta_n) T_BE(0).
Pose poe_forward(const KinematicChain& chain, std::span<const double> theta);

/// Z_hand = T_BE T_EC_H T_CH_AH T_AH_G
Pose hand_pseudo_pose(const Pose& t_BE, const ExtrinsicSet& ext, const Pose& t_CH_AH);
/// Z_base = T_BC_B T_CB_AB T_AB_G
Pose base_pseudo_pose(const ExtrinsicSet& ext, const Pose& t_CB_AB);

/// Tag pose the hand camera would report for target pose t_BG (inverse of hand_pseudo_pose).
Pose hand_tag_observation(const Pose& t_BE, const ExtrinsicSet& ext, const Pose& t_BG);
/// Tag pose the base camera would report for target pose t_BG (inverse of base_pseudo_pose).
Pose base_tag_observation(const ExtrinsicSet& ext, const Pose& t_BG);

/// Synthetic 6-DOF arm loosely shaped like an 850 mm-reach manipulator. The
/// geometry is made up for tests and simulation; it is not a calibrated model.
KinematicChain synthetic_six_dof_chain();

}  // namespace dualview
