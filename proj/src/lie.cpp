#include "dualview/lie.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Below this angle the J_r coefficients come from their Taylor series.
constexpr double kJacobianSeriesAngle = 1e-2;

}  // namespace

Rotation Rotation::fromMatrix(const Matrix3& m) {
    const double orth = (m * m.transpose() - Matrix3::Identity()).norm();
    const double det = m.determinant();
    if (!(orth < 1e-9) || !(std::abs(det - 1.0) < 1e-9)) {
        throw ContractViolation("matrix is not a rotation (orthogonality error " + std::to_string(orth) +
                                ", det " + std::to_string(det) + ")");
    }
    return Rotation(m);
}

Rotation Rotation::orthonormalized() const {
    Eigen::JacobiSVD<Matrix3> svd(matrix_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3 u = svd.matrixU();
    const Matrix3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) *= -1.0;
    }
    return Rotation(u * v.transpose());
}

double Rotation::orthogonalityError() const {
    return (matrix_ * matrix_.transpose() - Matrix3::Identity()).norm();
}

Pose Pose::fromMatrix(const Matrix4& m) {
    if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
        throw ContractViolation("homogeneous transform must have bottom row (0, 0, 0, 1)");
    }
    return {Rotation::fromMatrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

Matrix4 Pose::matrix() const {
    Matrix4 m = Matrix4::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
}

Pose Pose::inverse() const {
    const Rotation rt = rotation.inverse();
    return {rt, -(rt * translation)};
}

Pose Pose::operator*(const Pose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
}

Matrix3 hat3(const Vector3& v) {
    Matrix3 m;
    // clang-format off
    m <<   0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
    // clang-format on
    return m;
}

Vector3 vee3(const Matrix3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Matrix4 hat(const Twist6& zeta) {
    Matrix4 m = Matrix4::Zero();
    m.topLeftCorner<3, 3>() = hat3(zeta.head<3>());
    m.topRightCorner<3, 1>() = zeta.tail<3>();
    return m;
}

Twist6 vee(const Matrix4& m) {
    Twist6 zeta;
    zeta << vee3(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>();
    return zeta;
}

Rotation so3_exp(const Vector3& phi) {
    const double angle = phi.norm();
    const Matrix3 k = hat3(phi);
    if (angle <= kSmallAngle) {
        return Rotation::fromMatrixUnchecked(Matrix3::Identity() + k + 0.5 * k * k);
    }
    const double half_sin = std::sin(0.5 * angle);
    // 1 - cos(x) = 2 sin^2(x/2), exact near zero
    const double b = 2.0 * half_sin * half_sin / (angle * angle);
    return Rotation::fromMatrixUnchecked(Matrix3::Identity() + (std::sin(angle) / angle) * k + b * k * k);
}

Vector3 so3_log(const Rotation& r) {
    const Matrix3& m = r.matrix();
    // w = sin(psi) * axis
    const Vector3 w = 0.5 * vee3(m - m.transpose());
    const double s = w.norm();
    const double c = 0.5 * (m.trace() - 1.0);
    const double psi = std::atan2(s, c);

    if (psi < kSmallAngle) {
        return w * (1.0 + psi * psi / 6.0);
    }
    if (psi > kPi - kPiBranch) {
        // (R + R^T)/2 = cos(psi) I + (1 - cos(psi)) a a^T
        const Matrix3 aat = (0.5 * (m + m.transpose()) - c * Matrix3::Identity()) / (1.0 - c);
        Eigen::Index i = 0;
        aat.diagonal().maxCoeff(&i);
        Vector3 axis = aat.col(i) / std::sqrt(std::max(aat(i, i), 0.0));
        axis.normalize();
        const double d = axis.dot(w);
        if (std::abs(d) > 1e-12) {
            if (d < 0.0) axis = -axis;
        } else {
            Eigen::Index j = 0;
            axis.cwiseAbs().maxCoeff(&j);
            if (axis(j) < 0.0) axis = -axis;
        }
        return psi * axis;
    }
    return w * (psi / s);
}

Matrix3 se3_V(const Vector3& phi) {
    const double angle = phi.norm();
    const Matrix3 k = hat3(phi);
    if (angle <= kSmallAngle) {
        return Matrix3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
    }
    const double half_sin = std::sin(0.5 * angle);
    const double a2 = angle * angle;
    const double b = 2.0 * half_sin * half_sin / a2;
    const double c = (angle - std::sin(angle)) / (a2 * angle);
    return Matrix3::Identity() + b * k + c * k * k;
}

Matrix3 se3_V_inverse(const Vector3& phi) {
    const double angle = phi.norm();
    const Matrix3 k = hat3(phi);
    double c = 0.0;
    if (angle < 1e-4) {
        const double a2 = angle * angle;
        c = 1.0 / 12.0 + a2 / 720.0;
    } else {
        const double half = 0.5 * angle;
        c = (1.0 - half * std::cos(half) / std::sin(half)) / (angle * angle);
    }
    return Matrix3::Identity() - 0.5 * k + c * k * k;
}

Pose se3_exp(const Twist6& zeta) {
    const Vector3 phi = zeta.head<3>();
    return {so3_exp(phi), se3_V(phi) * zeta.tail<3>()};
}

Twist6 se3_log(const Pose& t) {
    const Vector3 phi = so3_log(t.rotation);
    Twist6 zeta;
    zeta << phi, se3_V_inverse(phi) * t.translation;
    return zeta;
}

Matrix6 adjoint_matrix(const Pose& t) {
    const Matrix3& r = t.rotation.matrix();
    Matrix6 ad = Matrix6::Zero();
    ad.topLeftCorner<3, 3>() = r;
    ad.bottomLeftCorner<3, 3>() = hat3(t.translation) * r;
    ad.bottomRightCorner<3, 3>() = r;
    return ad;
}

Matrix6 ad_matrix(const Twist6& zeta) {
    const Matrix3 phi_x = hat3(zeta.head<3>());
    Matrix6 ad = Matrix6::Zero();
    ad.topLeftCorner<3, 3>() = phi_x;
    ad.bottomLeftCorner<3, 3>() = hat3(zeta.tail<3>());
    ad.bottomRightCorner<3, 3>() = phi_x;
    return ad;
}

Matrix6 se3_right_jacobian(const Twist6& zeta) {
    const double p = zeta.head<3>().norm();
    const Matrix6 ad = ad_matrix(zeta);
    const Matrix6 ad2 = ad * ad;

    double a1, a2, a3, a4;
    if (p < kJacobianSeriesAngle) {
        const double p2 = p * p;
        const double p4 = p2 * p2;
        const double p6 = p4 * p2;
        const double p8 = p4 * p4;
        a1 = 0.5 - p4 / 720.0 + p6 / 20160.0 - p8 / 1209600.0;
        a2 = 1.0 / 6.0 - p4 / 5040.0 + p6 / 181440.0 - p8 / 13305600.0;
        a3 = 1.0 / 24.0 - p2 / 360.0 + p4 / 13440.0 - p6 / 907200.0 + p8 / 95800320.0;
        a4 = 1.0 / 120.0 - p2 / 2520.0 + p4 / 120960.0 - p6 / 9979200.0 + p8 / 1245404160.0;
    } else {
        const double s = std::sin(p);
        const double c = std::cos(p);
        const double p2 = p * p;
        const double p3 = p2 * p;
        a1 = (4.0 - p * s - 4.0 * c) / (2.0 * p2);
        a2 = (4.0 * p - 5.0 * s + p * c) / (2.0 * p3);
        a3 = (2.0 - p * s - 2.0 * c) / (2.0 * p2 * p2);
        a4 = (2.0 * p - 3.0 * s + p * c) / (2.0 * p3 * p2);
    }
    return Matrix6::Identity() - a1 * ad + a2 * ad2 - a3 * ad2 * ad + a4 * ad2 * ad2;
}

Matrix6 se3_right_jacobian_inverse(const Twist6& zeta) {
    return se3_right_jacobian(zeta).partialPivLu().inverse();
}

}  // namespace dualview
