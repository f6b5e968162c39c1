#include "dualview/aekf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dualview/covariance.hpp"
#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr double kMaxInnovationCondition = 1e12;

bool is_symmetric_psd(const Eigen::MatrixXd& m) {
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff() >= -1e-10;
}

}  // namespace

NoiseConfig NoiseConfig::fromBlocks(const Matrix3& q_nw, const Matrix3& q_nv, const Matrix6& r, double f_q,
                                    double f_r) {
    NoiseConfig n;
    n.q.setZero();
    n.q.block<3, 3>(6, 6) = q_nw;
    n.q.block<3, 3>(9, 9) = q_nv;
    n.r = r;
    n.f_q = f_q;
    n.f_r = f_r;
    return n;
}

void NoiseConfig::validate() const {
    if (!(f_q >= 0.0 && f_q <= 1.0) || !(f_r >= 0.0 && f_r <= 1.0)) {
        throw ContractViolation("forgetting factors must lie in [0, 1]");
    }
    if (!is_symmetric_psd(q)) throw ContractViolation("process noise q must be symmetric PSD");
    if (!is_symmetric_psd(r)) throw ContractViolation("measurement noise r must be symmetric PSD");
}

Matrix6x12 measurement_jacobian() {
    Matrix6x12 h = Matrix6x12::Zero();
    h.leftCols<6>().setIdentity();
    return h;
}

PredictResult predict(const StateEstimate& est, const NoiseConfig& noise, double dt) {
    if (!(dt > 0.0)) {
        throw ContractViolation("predict requires dt > 0");
    }
    PredictResult out;
    PredictRecord& rec = out.record;

    // constant-velocity model: f = [omega; v; 0; 0]
    rec.f_bar.setZero();
    rec.f_bar.segment<3>(0) = dt * est.mean.omega;
    rec.f_bar.segment<3>(3) = dt * est.mean.velocity;

    // D = d f_bar / d zeta
    Matrix12 d = Matrix12::Zero();
    d.topRightCorner<6, 6>() = dt * Matrix6::Identity();

    const Matrix12 jr = state_right_jacobian(rec.f_bar);
    rec.f_matrix = state_adjoint(state_exp(-rec.f_bar)) + jr * d;
    rec.q_discrete = dt * noise.q;

    out.estimate.mean = est.mean * state_exp(rec.f_bar);
    const Matrix12 p = rec.f_matrix * est.cov * rec.f_matrix.transpose() + jr * rec.q_discrete * jr.transpose();
    out.estimate.cov = condition_covariance(p, "predict");
    return out;
}

UpdateResult update(const StateEstimate& prior, const Pose& z, const NoiseConfig& noise,
                    const FilterOptions& options) {
    UpdateResult out;
    out.estimate = prior;

    const Matrix6x12 h = measurement_jacobian();
    const Twist6 nu = se3_log(prior.mean.pose.inverse() * z);
    const Matrix6 s = symmetrized(prior.cov.topLeftCorner<6, 6>() + noise.r);

    Eigen::SelfAdjointEigenSolver<Matrix6> es(s);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!s.allFinite() || !(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
        out.status = MeasurementStatus::RejectedSingular;
        return out;
    }
    const Eigen::LDLT<Matrix6> s_ldlt(s);
    if (options.gate && nu.dot(s_ldlt.solve(nu)) >= options.gate_threshold) {
        out.status = MeasurementStatus::RejectedGate;
        return out;
    }

    // K = P H^T S^-1, with P H^T the first six columns of P
    const Matrix12x6 k = s_ldlt.solve(prior.cov.topRows<6>()).transpose();
    const StateTangent correction = k * nu;
    const Matrix12 jr = state_right_jacobian(correction);

    out.estimate.mean = prior.mean * state_exp(correction);
    const Matrix12 p = jr * (Matrix12::Identity() - k * h) * prior.cov * jr.transpose();
    out.estimate.cov = condition_covariance(p, "update");

    UpdateRecord rec;
    rec.gain = k;
    rec.innovation = nu;
    rec.residual = residual(out.estimate, z);
    rec.h_matrix = h;
    rec.innovation_cov = s;
    out.record = rec;
    out.status = MeasurementStatus::Applied;
    return out;
}

Twist6 residual(const StateEstimate& posterior, const Pose& z) {
    return se3_log(posterior.mean.pose.inverse() * z);
}

NoiseConfig adapt_noise(const NoiseConfig& noise, const UpdateRecord& rec, const Matrix12& p_prior) {
    NoiseConfig out = noise;
    const StateTangent correction = rec.gain * rec.innovation;
    const Matrix12 q_sample = correction * correction.transpose();
    const Matrix6 r_sample =
        rec.residual * rec.residual.transpose() + rec.h_matrix * p_prior * rec.h_matrix.transpose();
    out.q = symmetrized(noise.f_q * noise.q + (1.0 - noise.f_q) * q_sample);
    out.r = symmetrized(noise.f_r * noise.r + (1.0 - noise.f_r) * r_sample);
    return out;
}

StepResult step(const StateEstimate& est, const NoiseConfig& noise, double dt, const std::optional<Pose>& z,
                const FilterOptions& options) {
    PredictResult pred = predict(est, noise, dt);
    StepResult out;
    out.prediction = pred.record;
    out.noise = noise;
    out.estimate = pred.estimate;
    if (!z) {
        return out;
    }

    UpdateResult upd = update(pred.estimate, *z, noise, options);
    out.status = upd.status;
    if (upd.status != MeasurementStatus::Applied) {
        return out;
    }
    upd.record->f_bar = pred.record.f_bar;
    upd.record->f_matrix = pred.record.f_matrix;
    out.estimate = upd.estimate;
    if (options.adaptive) {
        out.noise = adapt_noise(noise, *upd.record,
                                options.r_adaptation_posterior ? upd.estimate.cov : pred.estimate.cov);
    }
    out.update = std::move(upd.record);
    return out;
}

}  // namespace dualview
