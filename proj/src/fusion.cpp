#include "dualview/fusion.hpp"

#include "dualview/cross_covariance.hpp"

namespace dualview {

FusedEstimate<StateGroup> fuse_tracks(const StateEstimate& first, const StateEstimate& second,
                                      const Matrix12& cross_first_second, const FusionOptions& options) {
    FusionInput<StateGroup> input;
    input.members = {first.mean, second.mean};
    input.joint_cov = joint_covariance(first.cov, second.cov, cross_first_second);
    return fuse(input, options);
}

}  // namespace dualview
