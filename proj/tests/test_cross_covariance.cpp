#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dualview/cross_covariance.hpp"
#include "support.hpp"

using namespace dualview;
using namespace dualview::test;

namespace {

NoiseConfig noise(double q_scale) {
    Matrix6 r = Matrix6::Zero();
    r.topLeftCorner<3, 3>() = 1e-6 * Matrix3::Identity();
    r.bottomRightCorner<3, 3>() = 1e-3 * Matrix3::Identity();
    return NoiseConfig::fromBlocks(q_scale * 1e-5 * Matrix3::Identity(), q_scale * 1e-2 * Matrix3::Identity(), r,
                                   1.0, 1.0);
}

StateEstimate start_estimate() {
    StateEstimate e;
    e.mean.pose = Pose::fromTranslation({0.4, 0.0, 0.1});
    e.mean.velocity = Vector3(0.01, 0, 0);
    e.cov = 1e-2 * Matrix12::Identity();
    return e;
}

}  // namespace

TEST(CrossCovariance, StartsAtZero) {
    CrossCovariance x;
    EXPECT_TRUE(x.matrix().isZero(0.0));
}

TEST(CrossCovariance, ZeroNoiseKeepsZero) {
    StateEstimate b = start_estimate(), h = start_estimate();
    CrossCovariance x;
    RandomStream rng(1, 904);
    for (int k = 0; k < 30; ++k) {
        const auto sb = step(b, noise(0.0), 0.066, b.mean.pose * se3_exp(random_twist(rng, 0.01)));
        const auto sh = step(h, noise(0.0), 0.066, std::nullopt);
        x.advance(FilterStepRecord::from(sb), FilterStepRecord::from(sh));
        b = sb.estimate;
        h = sh.estimate;
    }
    EXPECT_TRUE(x.matrix().isZero(0.0));
}

TEST(CrossCovariance, NoUpdatesIsPurePropagation) {
    StateEstimate b = start_estimate(), h = start_estimate();
    h.mean.velocity = Vector3(0.0, 0.02, 0.0);
    CrossCovariance x;
    Matrix12 expected = Matrix12::Zero();
    for (int k = 0; k < 20; ++k) {
        const auto sb = step(b, noise(1.0), 0.066, std::nullopt);
        const auto sh = step(h, noise(1.0), 0.066, std::nullopt);
        const Matrix12 jb = state_right_jacobian(sb.prediction.f_bar);
        const Matrix12 jh = state_right_jacobian(sh.prediction.f_bar);
        expected = sb.prediction.f_matrix * expected * sh.prediction.f_matrix.transpose() +
                   jb * sb.prediction.q_discrete * jh.transpose();
        x.advance(FilterStepRecord::from(sb), FilterStepRecord::from(sh));
        b = sb.estimate;
        h = sh.estimate;
    }
    EXPECT_LT((x.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CrossCovariance, CouplingModesAgreeForEqualNoise) {
    const auto sb = step(start_estimate(), noise(1.0), 0.066, std::nullopt);
    const auto sh = step(start_estimate(), noise(1.0), 0.066, std::nullopt);
    const auto rb = FilterStepRecord::from(sb), rh = FilterStepRecord::from(sh);
    EXPECT_EQ(coupling_process_noise(rb, rh, CouplingNoise::Mean), sb.prediction.q_discrete);
    EXPECT_EQ(coupling_process_noise(rb, rh, CouplingNoise::SharedSquareRoot), sb.prediction.q_discrete);
}

TEST(CrossCovariance, SharedSquareRootKeepsJointNoisePsd) {
    const auto sb = step(start_estimate(), noise(1.0), 0.066, std::nullopt);
    const auto sh = step(start_estimate(), noise(4.0), 0.066, std::nullopt);
    const auto rb = FilterStepRecord::from(sb), rh = FilterStepRecord::from(sh);
    auto min_eig = [&](CouplingNoise mode) {
        const Matrix24 j =
            joint_covariance(sb.prediction.q_discrete, sh.prediction.q_discrete, coupling_process_noise(rb, rh, mode));
        return Eigen::SelfAdjointEigenSolver<Matrix24>(j).eigenvalues().minCoeff();
    };
    EXPECT_GT(min_eig(CouplingNoise::SharedSquareRoot), -1e-15);
    EXPECT_LT(min_eig(CouplingNoise::Mean), -1e-6);
}

TEST(CrossCovariance, UpdateFactorsApplied) {
    RandomStream rng(2, 904);
    const auto sb = step(start_estimate(), noise(1.0), 0.066, Pose::fromTranslation({0.41, 0, 0.1}));
    const auto sh = step(start_estimate(), noise(1.0), 0.066, Pose::fromTranslation({0.40, 0.01, 0.1}));
    const Matrix12 p0 = random_spd(rng, 12, 1e-3);
    const Matrix12 q = sb.prediction.q_discrete;
    const Matrix12 out = propagate_and_update(p0, FilterStepRecord::from(sb), FilterStepRecord::from(sh), q);
    const Matrix6x12 h = measurement_jacobian();
    const Matrix12 ib = Matrix12::Identity() - sb.update->gain * h;
    const Matrix12 ih = Matrix12::Identity() - sh.update->gain * h;
    const Matrix12 mid = sb.prediction.f_matrix * p0 * sh.prediction.f_matrix.transpose() +
                         state_right_jacobian(sb.prediction.f_bar) * q *
                             state_right_jacobian(sh.prediction.f_bar).transpose();
    EXPECT_LT((out - ib * mid * ih.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}
