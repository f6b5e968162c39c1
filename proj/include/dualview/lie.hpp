#pragma once

// SO(3) / SE(3) primitives. Tangent vectors are ordered rotation first: [phi; rho].

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dualview {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;
using Twist6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Below this angle exp/log/V switch to Taylor branches.
inline constexpr double kSmallAngle = 1e-8;
/// log extracts the axis from the symmetric part when the angle is within this of pi;
/// dividing by sin(psi) there loses digits.
inline constexpr double kPiBranch = 0.25;

class Rotation {
public:
    Rotation() : matrix_(Matrix3::Identity()) {}

    /// Validates orthonormality and det = +1 to 1e-9; throws ContractViolation otherwise.
    static Rotation fromMatrix(const Matrix3& m);
    /// Skips validation. Use for results of exact group operations.
    static Rotation fromMatrixUnchecked(const Matrix3& m) { return Rotation(m); }

    const Matrix3& matrix() const { return matrix_; }

    Rotation operator*(const Rotation& other) const { return Rotation(matrix_ * other.matrix_); }
    Vector3 operator*(const Vector3& v) const { return matrix_ * v; }
    Rotation inverse() const { return Rotation(matrix_.transpose()); }

    /// Nearest rotation in the Frobenius sense (polar decomposition).
    Rotation orthonormalized() const;

    /// Frobenius norm of R R^T - I.
    double orthogonalityError() const;

private:
    explicit Rotation(const Matrix3& m) : matrix_(m) {}
    Matrix3 matrix_;
};

struct Pose {
    Rotation rotation;
    Vector3 translation = Vector3::Zero();

    static Pose identity() { return {}; }
    static Pose fromMatrix(const Matrix4& m);
    static Pose fromTranslation(const Vector3& p) { return {Rotation(), p}; }

    Matrix4 matrix() const;
    Pose inverse() const;
    Pose operator*(const Pose& other) const;
    Vector3 operator*(const Vector3& point) const { return rotation * point + translation; }
};

Matrix3 hat3(const Vector3& v);
Vector3 vee3(const Matrix3& m);
Matrix4 hat(const Twist6& zeta);
Twist6 vee(const Matrix4& m);

Rotation so3_exp(const Vector3& phi);
Vector3 so3_log(const Rotation& r);

/// V(phi): the translational part of the SE(3) exponential.
Matrix3 se3_V(const Vector3& phi);
Matrix3 se3_V_inverse(const Vector3& phi);

Pose se3_exp(const Twist6& zeta);
Twist6 se3_log(const Pose& t);

/// Ad_T = [[R, 0], [[p]x R, R]].
Matrix6 adjoint_matrix(const Pose& t);
/// ad_zeta = [[[phi]x, 0], [[rho]x, [phi]x]].
Matrix6 ad_matrix(const Twist6& zeta);

/// Right Jacobian, closed form in powers of ad_zeta:
///   J_r = I - a1 ad + a2 ad^2 - a3 ad^3 + a4 ad^4
/// The coefficients are evaluated by their Taylor series at small angles, where
/// the closed-form quotients lose all precision to cancellation. The zero-angle
/// limit is I - ad/2, consistent with sum_k (-ad)^k / (k+1)!.
Matrix6 se3_right_jacobian(const Twist6& zeta);
Matrix6 se3_right_jacobian_inverse(const Twist6& zeta);

}  // namespace dualview
