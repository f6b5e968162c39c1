#pragma once

// Randomized cross-check of the closed-form fusion against the brute-force
// cost minimizer on two-member SE(3) problems.

#include <cstdint>

#include "dualview/fusion.hpp"
#include "dualview/rng.hpp"

namespace dualview {

struct FusionCheckOptions {
    std::uint64_t seed = 7;
    int instances = 100;
    /// Std of the tangent offset between the two members.
    double offset_sigma = 0.05;
    double tolerance = 1e-6;
};

struct FusionCheckReport {
    int instances = 0;
    /// max |log(closed^-1 oracle)| for the single-step and the iterated closed form.
    double max_error_single = 0.0;
    double max_error_iterated = 0.0;
    double mean_error_single = 0.0;
    int oracle_failures = 0;
    bool passed = false;
};

/// Random two-member instance: correlated joint covariance with member
/// standard deviations around offset_sigma.
FusionInput<Se3Group> random_fusion_instance(RandomStream& rng, double offset_sigma);

FusionCheckReport run_fusion_cross_check(const FusionCheckOptions& options = {});

}  // namespace dualview
