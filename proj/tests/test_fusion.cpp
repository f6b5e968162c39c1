#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dualview/covariance.hpp"
#include "dualview/errors.hpp"
#include "dualview/fusion.hpp"
#include "dualview/fusion_check.hpp"
#include "support.hpp"

using namespace dualview;
using namespace dualview::test;

namespace {

FusionInput<Se3Group> two_members(RandomStream& rng, double offset, double sigma) {
    FusionInput<Se3Group> in;
    const Pose a = random_pose(rng);
    in.members = {a, a * se3_exp(random_twist(rng, offset))};
    in.joint_cov = random_spd(rng, 12, sigma * sigma);
    return in;
}

/// Correlated weighted least squares for n stacked measurements of one vector.
Eigen::VectorXd wls(const std::vector<Eigen::VectorXd>& y, const Eigen::MatrixXd& sigma, Eigen::MatrixXd& cov) {
    const Eigen::Index m = y.front().size();
    const Eigen::Index n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd h(n * m, m);
    Eigen::VectorXd stacked(n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        h.middleRows(i * m, m).setIdentity();
        stacked.segment(i * m, m) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd w = sigma.inverse();
    cov = (h.transpose() * w * h).inverse();
    return cov * h.transpose() * w * stacked;
}

/// Random joint covariance with the pose slots of every member uncorrelated with
/// the omega/velocity slots of every member.
Eigen::MatrixXd decoupled_joint(RandomStream& rng, int n) {
    const Eigen::MatrixXd pose = random_spd(rng, 6 * n, 1e-2);
    const Eigen::MatrixXd euclid = random_spd(rng, 6 * n, 1e-2);
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(12 * n, 12 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            joint.block(12 * i, 12 * j, 6, 6) = pose.block(6 * i, 6 * j, 6, 6);
            joint.block(12 * i + 6, 12 * j + 6, 6, 6) = euclid.block(6 * i, 6 * j, 6, 6);
        }
    }
    return joint;
}

}  // namespace

TEST(Fusion, SingleMemberIsIdentity) {
    RandomStream rng(1, 905);
    for (int i = 0; i < 20; ++i) {
        FusionInput<StateGroup> in;
        StateTangent xi;
        xi << random_twist(rng, 1.0), random_vec3(rng, 0.1), random_vec3(rng, 0.1);
        in.members = {state_exp(xi)};
        in.joint_cov = random_spd(rng, 12, 1e-2);
        const FusedEstimate<StateGroup> f = fuse(in);
        EXPECT_LT((f.mean.matrix() - in.members[0].matrix()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((f.cov - in.joint_cov).cwiseAbs().maxCoeff(), 1e-12 * in.joint_cov.cwiseAbs().maxCoeff());
    }
}

TEST(Fusion, CoincidentMeansHalveCovariance) {
    RandomStream rng(2, 905);
    FusionInput<Se3Group> in;
    const Pose a = random_pose(rng);
    in.members = {a, a};
    const Eigen::MatrixXd p = random_spd(rng, 6, 1e-3);
    in.joint_cov = Eigen::MatrixXd::Zero(12, 12);
    in.joint_cov.topLeftCorner(6, 6) = p;
    in.joint_cov.bottomRightCorner(6, 6) = p;
    const FusedEstimate<Se3Group> f = fuse(in);
    EXPECT_LT((f.mean.matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((f.cov - 0.5 * p).cwiseAbs().maxCoeff(), 1e-15);

    FusionOptions literal;
    literal.normalization = 1.0;
    EXPECT_LT((fuse(in, literal).cov - 0.25 * p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fusion, EuclideanReductionMatchesCorrelatedWls) {
    // identity poses and no pose/velocity correlation: the correction stays in the
    // velocity block, where J_r = I
    RandomStream rng(3, 905);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 3;
        FusionInput<StateGroup> in;
        std::vector<Eigen::VectorXd> y;
        for (int i = 0; i < n; ++i) {
            TargetState x;
            x.omega = random_vec3(rng, 0.1);
            x.velocity = random_vec3(rng, 0.1);
            in.members.push_back(x);
            y.push_back(state_log(x));
        }
        in.joint_cov = decoupled_joint(rng, n);
        Eigen::MatrixXd cov;
        const Eigen::VectorXd x_wls = wls(y, in.joint_cov, cov);
        for (auto ref : {ReferencePolicy::minTrace(), ReferencePolicy::fixed(1)}) {
            const FusedEstimate<StateGroup> f = fuse(in, {2.0, ref});
            EXPECT_LT((state_log(f.mean) - x_wls).cwiseAbs().maxCoeff(), 1e-9);
            EXPECT_LT((f.cov - cov).cwiseAbs().maxCoeff(), 1e-9);
        }
    }
}

TEST(Fusion, MatchesBruteForceMinimizerWhenIterated) {
    RandomStream rng(4, 905);
    FusionOptions iterate;
    iterate.reference = ReferencePolicy::iterate();
    for (int i = 0; i < 30; ++i) {
        const FusionInput<Se3Group> in = random_fusion_instance(rng, 0.05);
        const OracleResult<Se3Group> oracle = minimize_cost_oracle(in);
        ASSERT_TRUE(oracle.converged);
        const FusedEstimate<Se3Group> f = fuse(in, iterate);
        EXPECT_LT(se3_log(f.mean.inverse() * oracle.mean).norm(), 1e-6);
        EXPECT_LE(fusion_cost(f.mean, in), oracle.cost + 1e-12);
    }
}

TEST(Fusion, SingleStepDecreasesCost) {
    RandomStream rng(5, 905);
    for (int i = 0; i < 50; ++i) {
        const FusionInput<Se3Group> in = random_fusion_instance(rng, 0.05);
        const double c = fusion_cost(fuse(in).mean, in);
        for (const Pose& m : in.members) EXPECT_LE(c, fusion_cost(m, in));
    }
}

TEST(Fusion, OracleOnSingleMember) {
    RandomStream rng(6, 905);
    FusionInput<Se3Group> in;
    in.members = {random_pose(rng)};
    in.joint_cov = random_spd(rng, 6, 1e-3);
    const OracleResult<Se3Group> r = minimize_cost_oracle(in);
    EXPECT_LT(se3_log(r.mean.inverse() * in.members[0]).norm(), 1e-12);
    EXPECT_NEAR(fusion_cost(in.members[0], in), 0.0, 0.0);
}

TEST(Fusion, PermutationInvariantForFixedReference) {
    RandomStream rng(7, 905);
    const FusionInput<Se3Group> in = two_members(rng, 0.05, 0.05);
    FusionInput<Se3Group> swapped;
    swapped.members = {in.members[1], in.members[0]};
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
    for (int i = 0; i < 6; ++i) {
        perm.indices()[i] = i + 6;
        perm.indices()[i + 6] = i;
    }
    swapped.joint_cov = perm * in.joint_cov * perm.transpose();
    const auto a = fuse(in, {2.0, ReferencePolicy::fixed(0)});
    const auto b = fuse(swapped, {2.0, ReferencePolicy::fixed(1)});
    EXPECT_LT((a.mean.matrix() - b.mean.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((a.cov - b.cov).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Fusion, ReferenceSensitivityIsSecondOrder) {
    RandomStream rng(8, 905);
    FusionInput<Se3Group> in = two_members(rng, 1.0, 0.05);
    const Twist6 offset = se3_log(in.members[0].inverse() * in.members[1]).normalized() * 0.2;
    std::vector<double> gaps;
    for (int k = 0; k < 5; ++k) {
        const double r = std::pow(0.5, k);
        in.members[1] = in.members[0] * se3_exp(r * offset);
        const auto a = fuse(in, {2.0, ReferencePolicy::fixed(0)});
        const auto b = fuse(in, {2.0, ReferencePolicy::fixed(1)});
        gaps.push_back(se3_log(a.mean.inverse() * b.mean).norm());
    }
    for (std::size_t k = 1; k < gaps.size(); ++k) EXPECT_GT(std::log2(gaps[k - 1] / gaps[k]), 1.9);
}

TEST(Fusion, RejectsBadInput) {
    FusionInput<Se3Group> empty;
    EXPECT_THROW(fuse(empty), ContractViolation);

    FusionInput<Se3Group> wrong;
    wrong.members = {Pose::identity(), Pose::identity()};
    wrong.joint_cov = Eigen::MatrixXd::Identity(6, 6);
    EXPECT_THROW(fuse(wrong), ContractViolation);

    FusionInput<Se3Group> singular;
    singular.members = {Pose::identity(), Pose::identity()};
    singular.joint_cov = Eigen::MatrixXd::Ones(12, 12);
    EXPECT_THROW(fuse(singular), DegenerateInput);
}

TEST(RepairPsd, Examples) {
    Eigen::Matrix2d m;
    m << 1.0, 0.0, 0.0, -1e-9;
    const Eigen::Matrix2d r = repair_psd(m);
    EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(r(1, 1), 1e-12, 1e-18);
    EXPECT_EQ(repair_psd(r), r);

    RandomStream rng(9, 905);
    const Eigen::MatrixXd spd = random_spd(rng, 8, 1.0);
    EXPECT_LT((repair_psd(spd) - spd).cwiseAbs().maxCoeff(), 1e-13);

    Eigen::MatrixXd indefinite(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j <= i; ++j) indefinite(i, j) = indefinite(j, i) = rng.normal();
    const Eigen::MatrixXd fixed = repair_psd(indefinite);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(fixed).eigenvalues().minCoeff(), 1e-12 * (1 - 1e-3));
    const Eigen::MatrixXd again = repair_psd(fixed);
    EXPECT_LT((again - fixed).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FuseTracks, HugeHandCovarianceDefersToBase) {
    StateEstimate base, hand;
    base.mean.pose = Pose::fromTranslation({0.4, 0.0, 0.1});
    base.mean.velocity = Vector3(0.01, 0, 0);
    base.cov = 1e-3 * Matrix12::Identity();
    hand.mean.pose = Pose::fromTranslation({0.5, 0.05, 0.1});
    hand.cov = 1e6 * Matrix12::Identity();
    const FusedEstimate<StateGroup> f = fuse_tracks(base, hand, Matrix12::Zero());
    EXPECT_LT(state_log(base.mean.inverse() * f.mean).norm(), 1e-3);
}
