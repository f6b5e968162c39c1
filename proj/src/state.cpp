#include "dualview/state.hpp"

#include <cmath>

#include "dualview/errors.hpp"

namespace dualview {

Matrix9 TargetState::matrix() const {
    Matrix9 m = Matrix9::Zero();
    m.topLeftCorner<4, 4>() = pose.matrix();
    m.bottomRightCorner<5, 5>().setIdentity();
    m.block<3, 1>(4, 7) = omega;
    m.block<3, 1>(4, 8) = velocity;
    return m;
}

TargetState TargetState::fromMatrix(const Matrix9& m) {
    Matrix9 expected_zero = m;
    expected_zero.topLeftCorner<4, 4>().setZero();
    expected_zero.bottomRightCorner<5, 5>() -= Eigen::Matrix<double, 5, 5>::Identity();
    expected_zero.block<3, 2>(4, 7).setZero();
    if (!expected_zero.isZero(0.0)) {
        throw ContractViolation("9x9 matrix does not have the augmented-state block layout");
    }
    return {Pose::fromMatrix(m.topLeftCorner<4, 4>()), m.block<3, 1>(4, 7), m.block<3, 1>(4, 8)};
}

TargetState TargetState::inverse() const { return {pose.inverse(), -omega, -velocity}; }

TargetState TargetState::operator*(const TargetState& other) const {
    return {pose * other.pose, omega + other.omega, velocity + other.velocity};
}

TargetState state_exp(const StateTangent& xi) {
    return {se3_exp(xi.head<6>()), xi.segment<3>(6), xi.segment<3>(9)};
}

StateTangent state_log(const TargetState& x) {
    StateTangent xi;
    xi << se3_log(x.pose), x.omega, x.velocity;
    return xi;
}

Matrix12 state_adjoint(const TargetState& x) {
    Matrix12 ad = Matrix12::Identity();
    ad.topLeftCorner<6, 6>() = adjoint_matrix(x.pose);
    return ad;
}

Matrix12 state_right_jacobian(const StateTangent& xi) {
    Matrix12 j = Matrix12::Identity();
    j.topLeftCorner<6, 6>() = se3_right_jacobian(xi.head<6>());
    return j;
}

Matrix12 state_right_jacobian_inverse(const StateTangent& xi) {
    Matrix12 j = Matrix12::Identity();
    j.topLeftCorner<6, 6>() = se3_right_jacobian_inverse(xi.head<6>());
    return j;
}

PaddedTangent pad_tangent(const StateTangent& xi) {
    PaddedTangent v;
    v << xi.head<6>(), Vector3::Zero(), xi.tail<6>();
    return v;
}

StateTangent unpad_tangent(const PaddedTangent& v) {
    if (v.segment<3>(6).cwiseAbs().maxCoeff() > 1e-12) {
        throw ContractViolation("padded tangent has nonzero components in the unused slots 7-9");
    }
    StateTangent xi;
    xi << v.head<6>(), v.tail<6>();
    return xi;
}

Matrix15 pad_covariance(const Matrix12& p) {
    Matrix15 out = Matrix15::Zero();
    out.topLeftCorner<6, 6>() = p.topLeftCorner<6, 6>();
    out.topRightCorner<6, 6>() = p.topRightCorner<6, 6>();
    out.bottomLeftCorner<6, 6>() = p.bottomLeftCorner<6, 6>();
    out.bottomRightCorner<6, 6>() = p.bottomRightCorner<6, 6>();
    return out;
}

Matrix12 unpad_covariance(const Matrix15& p) {
    Matrix12 out;
    out.topLeftCorner<6, 6>() = p.topLeftCorner<6, 6>();
    out.topRightCorner<6, 6>() = p.topRightCorner<6, 6>();
    out.bottomLeftCorner<6, 6>() = p.bottomLeftCorner<6, 6>();
    out.bottomRightCorner<6, 6>() = p.bottomRightCorner<6, 6>();
    return out;
}

}  // namespace dualview
