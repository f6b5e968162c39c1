#include "dualview/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dualview/errors.hpp"

namespace dualview {

bool pose_nees(const StateEstimate& est, const TargetState& truth, double& nees) {
    const Twist6 eps = se3_log(est.mean.pose.inverse() * truth.pose);
    const Matrix6 p = est.cov.topLeftCorner<6, 6>();
    Eigen::SelfAdjointEigenSolver<Matrix6> es(p);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!p.allFinite() || !(lo > 0.0) || hi / lo > 1e12) {
        return false;
    }
    nees = eps.dot(p.ldlt().solve(eps));
    return std::isfinite(nees);
}

RunMetrics compute_metrics(const std::vector<StateEstimate>& estimates, const std::vector<TargetState>& truth) {
    if (estimates.size() != truth.size() || estimates.empty()) {
        throw ContractViolation("metrics need equally long, non-empty estimate and truth sequences");
    }
    RunMetrics m;
    double nees_sum = 0.0;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        const TargetState& x = estimates[k].mean;
        const TargetState& t = truth[k];
        m.rmse_position += (x.pose.translation - t.pose.translation).squaredNorm();
        m.rmse_rotation += so3_log(x.pose.rotation.inverse() * t.pose.rotation).squaredNorm();
        m.rmse_velocity += (x.velocity - t.velocity).squaredNorm();
        m.rmse_angular_velocity += (x.omega - t.omega).squaredNorm();
        double nees = 0.0;
        if (pose_nees(estimates[k], t, nees)) {
            nees_sum += nees;
            ++m.nees_samples;
        } else {
            ++m.nees_omitted;
        }
    }
    const double n = static_cast<double>(estimates.size());
    m.rmse_position = std::sqrt(m.rmse_position / n);
    m.rmse_rotation = std::sqrt(m.rmse_rotation / n);
    m.rmse_velocity = std::sqrt(m.rmse_velocity / n);
    m.rmse_angular_velocity = std::sqrt(m.rmse_angular_velocity / n);
    m.nees_mean = m.nees_samples > 0 ? nees_sum / m.nees_samples : std::nan("");
    m.update_rate = std::nan("");
    return m;
}

double velocity_variance(const std::vector<StateEstimate>& estimates) {
    if (estimates.size() < 2) {
        throw ContractViolation("velocity variance needs at least two samples");
    }
    Vector3 mean = Vector3::Zero();
    for (const auto& e : estimates) mean += e.mean.velocity;
    mean /= static_cast<double>(estimates.size());
    double acc = 0.0;
    for (const auto& e : estimates) acc += (e.mean.velocity - mean).squaredNorm();
    return acc / static_cast<double>(estimates.size() - 1);
}

}  // namespace dualview
