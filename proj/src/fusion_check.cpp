#include "dualview/fusion_check.hpp"

#include <algorithm>
#include <cmath>

namespace dualview {

namespace {

constexpr std::uint64_t kCheckStream = 100;

Twist6 normal6(RandomStream& rng, double sigma) {
    Twist6 v;
    for (int i = 0; i < 6; ++i) v(i) = sigma * rng.normal();
    return v;
}

}  // namespace

FusionInput<Se3Group> random_fusion_instance(RandomStream& rng, double offset_sigma) {
    FusionInput<Se3Group> in;
    const Pose first = se3_exp(normal6(rng, 0.5));
    in.members = {first, first * se3_exp(normal6(rng, offset_sigma))};

    Eigen::MatrixXd l(12, 12);
    for (Eigen::Index r = 0; r < 12; ++r)
        for (Eigen::Index c = 0; c < 12; ++c) l(r, c) = rng.normal();
    l *= offset_sigma / std::sqrt(12.0);
    in.joint_cov = l * l.transpose() + 0.1 * offset_sigma * offset_sigma * Eigen::MatrixXd::Identity(12, 12);
    return in;
}

FusionCheckReport run_fusion_cross_check(const FusionCheckOptions& options) {
    RandomStream rng(options.seed, kCheckStream);
    FusionCheckReport rep;
    FusionOptions single;
    FusionOptions iterated;
    iterated.reference = ReferencePolicy::iterate();
    double sum_single = 0.0;
    for (int i = 0; i < options.instances; ++i) {
        const FusionInput<Se3Group> in = random_fusion_instance(rng, options.offset_sigma);
        const OracleResult<Se3Group> oracle = minimize_cost_oracle(in);
        if (!oracle.converged) ++rep.oracle_failures;
        const double e1 = se3_log(fuse(in, single).mean.inverse() * oracle.mean).norm();
        const double e2 = se3_log(fuse(in, iterated).mean.inverse() * oracle.mean).norm();
        rep.max_error_single = std::max(rep.max_error_single, e1);
        rep.max_error_iterated = std::max(rep.max_error_iterated, e2);
        sum_single += e1;
        ++rep.instances;
    }
    rep.mean_error_single = rep.instances > 0 ? sum_single / rep.instances : 0.0;
    rep.passed = rep.oracle_failures == 0 && rep.max_error_iterated <= options.tolerance;
    return rep;
}

}  // namespace dualview
