#include "dualview/cross_covariance.hpp"

#include <Eigen/Eigenvalues>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

Matrix12 update_factor(const FilterStepRecord& rec) {
    if (!rec.update) {
        return Matrix12::Identity();
    }
    return Matrix12::Identity() - rec.update->gain * rec.update->h_matrix;
}

Matrix12 psd_sqrt(const Matrix12& q) {
    Eigen::SelfAdjointEigenSolver<Matrix12> es(0.5 * (q + q.transpose()));
    const StateTangent d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Matrix12 coupling_process_noise(const FilterStepRecord& base, const FilterStepRecord& hand, CouplingNoise mode) {
    const Matrix12& qb = base.prediction.q_discrete;
    const Matrix12& qh = hand.prediction.q_discrete;
    if (mode == CouplingNoise::Mean || qb == qh) {
        return 0.5 * (qb + qh);
    }
    return psd_sqrt(qb) * psd_sqrt(qh);
}

Matrix12 propagate_and_update(const Matrix12& p_bh, const FilterStepRecord& base, const FilterStepRecord& hand,
                              const Matrix12& q_coupling) {
    const Matrix12 jr_b = state_right_jacobian(base.prediction.f_bar);
    const Matrix12 jr_h = state_right_jacobian(hand.prediction.f_bar);
    const Matrix12 propagated = base.prediction.f_matrix * p_bh * hand.prediction.f_matrix.transpose() +
                                jr_b * q_coupling * jr_h.transpose();
    const Matrix12 out = update_factor(base) * propagated * update_factor(hand).transpose();
    if (!out.allFinite()) {
        throw NumericalFailure("cross-covariance recursion produced non-finite entries");
    }
    return out;
}

Matrix24 joint_covariance(const Matrix12& p_first, const Matrix12& p_second, const Matrix12& p_first_second) {
    Matrix24 j;
    j.topLeftCorner<12, 12>() = p_first;
    j.topRightCorner<12, 12>() = p_first_second;
    j.bottomLeftCorner<12, 12>() = p_first_second.transpose();
    j.bottomRightCorner<12, 12>() = p_second;
    return j;
}

}  // namespace dualview
