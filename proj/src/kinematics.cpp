#include "dualview/kinematics.hpp"

#include <cmath>

#include "dualview/errors.hpp"

namespace dualview {

JointScrew::JointScrew(const Vector3& axis, const Vector3& point_on_axis) : axis_(axis), point_(point_on_axis) {
    if (!(std::abs(axis.norm() - 1.0) <= 1e-10)) {
        throw ContractViolation("joint axis must be a unit vector");
    }
}

JointScrew JointScrew::fromTwist(const Twist6& twist) {
    const Vector3 w = twist.head<3>();
    const Vector3 v = twist.tail<3>();
    // v = -w x q = q x w; the point closest to the origin is q = w x v for unit w
    return JointScrew(w, w.cross(v));
}

Twist6 JointScrew::twist() const {
    Twist6 t;
    t << axis_, -axis_.cross(point_);
    return t;
}

Pose poe_forward(const KinematicChain& chain, std::span<const double> theta) {
    if (theta.size() != chain.screws.size()) {
        throw ContractViolation("joint vector length " + std::to_string(theta.size()) + " does not match " +
                                std::to_string(chain.screws.size()) + " screws");
    }
    Pose t = Pose::identity();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        t = t * se3_exp(chain.screws[i].twist() * theta[i]);
    }
    return t * chain.home;
}

Pose hand_pseudo_pose(const Pose& t_BE, const ExtrinsicSet& ext, const Pose& t_CH_AH) {
    return t_BE * ext.t_EC_H * t_CH_AH * ext.t_AH_G;
}

Pose base_pseudo_pose(const ExtrinsicSet& ext, const Pose& t_CB_AB) { return ext.t_BC_B * t_CB_AB * ext.t_AB_G; }

Pose hand_tag_observation(const Pose& t_BE, const ExtrinsicSet& ext, const Pose& t_BG) {
    return (t_BE * ext.t_EC_H).inverse() * t_BG * ext.t_AH_G.inverse();
}

Pose base_tag_observation(const ExtrinsicSet& ext, const Pose& t_BG) {
    return ext.t_BC_B.inverse() * t_BG * ext.t_AB_G.inverse();
}

KinematicChain synthetic_six_dof_chain() {
    const Vector3 z = Vector3::UnitZ();
    const Vector3 y = Vector3::UnitY();
    const Vector3 x = Vector3::UnitX();
    KinematicChain chain;
    chain.screws = {
        JointScrew(z, Vector3(0.0, 0.0, 0.0)),
        JointScrew(y, Vector3(0.0, 0.0, 0.267)),
        JointScrew(y, Vector3(0.0535, 0.0, 0.6515)),
        JointScrew(x, Vector3(0.131, 0.0, 0.5095)),
        JointScrew(y, Vector3(0.4735, 0.0, 0.5095)),
        JointScrew(x, Vector3(0.5495, 0.0, 0.5095)),
    };
    // tool pointing down along -z
    const Rotation down = so3_exp(Vector3(3.14159265358979323846, 0.0, 0.0));
    chain.home = {down, Vector3(0.5495, 0.0, 0.4325)};
    return chain;
}

}  // namespace dualview
