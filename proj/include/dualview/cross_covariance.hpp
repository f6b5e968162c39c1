#pragma once

// Cross-covariance between the base and hand filters' tangent errors. Both
// filters track the same target, so the shared process noise correlates them.

#include "dualview/aekf.hpp"

namespace dualview {

using Matrix24 = Eigen::Matrix<double, 24, 24>;

/// What one filter contributed at step k.
struct FilterStepRecord {
    PredictRecord prediction;
    /// Absent when the filter had no (accepted) measurement; its (I - K H) factor is then I.
    std::optional<UpdateRecord> update;

    static FilterStepRecord from(const StepResult& s) { return {s.prediction, s.update}; }
};

/// How the coupling term reconciles the two filters' process noises once adaptation makes them differ.
enum class CouplingNoise {
    /// Q_b^1/2 Q_h^1/2 (symmetric square roots): both filters driven by the same white noise.
    /// Keeps the joint noise [[Q_b, .], [., Q_h]] PSD.
    SharedSquareRoot,
    /// (Q_b + Q_h) / 2. The joint noise is indefinite whenever Q_b != Q_h.
    Mean,
};

/// Cross process-noise term between the filters. Both variants equal Q when Q_b == Q_h.
Matrix12 coupling_process_noise(const FilterStepRecord& base, const FilterStepRecord& hand,
                                CouplingNoise mode = CouplingNoise::SharedSquareRoot);

/// P_bh <- (I - K_b H_b)(F_b P_bh F_h^T + J_r(f_b) Q_bh J_r(f_h)^T)(I - K_h H_h)^T
Matrix12 propagate_and_update(const Matrix12& p_bh, const FilterStepRecord& base, const FilterStepRecord& hand,
                              const Matrix12& q_coupling);

/// Stateful wrapper; starts at P_bh(0|0) = 0.
class CrossCovariance {
public:
    explicit CrossCovariance(CouplingNoise mode = CouplingNoise::SharedSquareRoot) : mode_(mode) {}

    const Matrix12& matrix() const { return p_bh_; }

    void advance(const FilterStepRecord& base, const FilterStepRecord& hand) {
        p_bh_ = propagate_and_update(p_bh_, base, hand, coupling_process_noise(base, hand, mode_));
    }

private:
    CouplingNoise mode_;
    Matrix12 p_bh_ = Matrix12::Zero();
};

/// [[P_first, P_fs], [P_fs^T, P_second]].
Matrix24 joint_covariance(const Matrix12& p_first, const Matrix12& p_second, const Matrix12& p_first_second);

}  // namespace dualview
