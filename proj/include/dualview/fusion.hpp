#pragma once

// Correlation-aware fusion of n group-valued estimates that share a full joint
// covariance (diagonal blocks P_ii, cross blocks P_ij). The fused mean minimizes
//   eps^T joint_cov^-1 eps,   eps_i = vee(log(mean_i^-1 X)),
// linearized about a reference member X_s.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

#include "dualview/covariance.hpp"
#include "dualview/errors.hpp"
#include "dualview/state.hpp"

namespace dualview {

struct Se3Group {
    using Element = Pose;
    static constexpr int kDim = 6;
    using Vector = Twist6;
    using Matrix = Matrix6;

    static Element compose(const Element& a, const Element& b) { return a * b; }
    static Element inverse(const Element& a) { return a.inverse(); }
    static Element exp(const Vector& v) { return se3_exp(v); }
    static Vector log(const Element& a) { return se3_log(a); }
    static Matrix right_jacobian(const Vector& v) { return se3_right_jacobian(v); }
    static Matrix right_jacobian_inverse(const Vector& v) { return se3_right_jacobian_inverse(v); }
};

struct StateGroup {
    using Element = TargetState;
    static constexpr int kDim = 12;
    using Vector = StateTangent;
    using Matrix = Matrix12;

    static Element compose(const Element& a, const Element& b) { return a * b; }
    static Element inverse(const Element& a) { return a.inverse(); }
    static Element exp(const Vector& v) { return state_exp(v); }
    static Vector log(const Element& a) { return state_log(a); }
    static Matrix right_jacobian(const Vector& v) { return state_right_jacobian(v); }
    static Matrix right_jacobian_inverse(const Vector& v) { return state_right_jacobian_inverse(v); }
};

template <class Group>
struct FusionInput {
    std::vector<typename Group::Element> members;
    /// (n*m) x (n*m), block (i, j) = P_ij.
    Eigen::MatrixXd joint_cov;
};

template <class Group>
struct FusedEstimate {
    typename Group::Element mean;
    typename Group::Matrix cov;
    /// Member used as the linearization point; -1 after iterated re-centering moved it off the members.
    int reference_index = 0;
    /// Tangent correction applied to the (final) reference.
    typename Group::Vector correction;
    int iterations = 1;
};

enum class ReferenceKind {
    MinTrace,  // member with the smallest trace(P_ii)
    Fixed,     // member `index`
    Iterate,   // start at MinTrace, re-center on the fused mean until the correction vanishes
};

struct ReferencePolicy {
    ReferenceKind kind = ReferenceKind::MinTrace;
    std::size_t index = 0;
    int max_iterations = 20;
    double tolerance = 1e-10;

    static ReferencePolicy minTrace() { return {}; }
    static ReferencePolicy fixed(std::size_t i) { return {ReferenceKind::Fixed, i}; }
    static ReferencePolicy iterate() { return {ReferenceKind::Iterate}; }
};

struct FusionOptions {
    /// Scale c in P* = c A^-1. c = 2 makes single-member fusion the identity;
    /// c = 1 reproduces the literal closed form.
    double normalization = 2.0;
    ReferencePolicy reference;
};

inline constexpr double kMaxFusionCondition = 1e12;

namespace detail {

template <class Group>
void check_input(const FusionInput<Group>& input) {
    const auto n = static_cast<Eigen::Index>(input.members.size());
    if (n == 0) {
        throw ContractViolation("fusion needs at least one member");
    }
    if (input.joint_cov.rows() != n * Group::kDim || input.joint_cov.cols() != n * Group::kDim) {
        throw ContractViolation("joint covariance dimension does not match member count");
    }
}

/// Inverse of the repaired joint covariance; DegenerateInput when cond > 1e12.
inline Eigen::MatrixXd information_matrix(const Eigen::MatrixXd& joint_cov) {
    const Eigen::MatrixXd repaired = repair_psd(joint_cov);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(repaired);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxFusionCondition) {
        throw DegenerateInput("joint covariance is singular or ill-conditioned (cond > 1e12)");
    }
    const Eigen::Index dim = repaired.rows();
    return symmetrized(repaired.ldlt().solve(Eigen::MatrixXd::Identity(dim, dim)));
}

template <class Matrix>
Matrix checked_inverse(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(a));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxFusionCondition) {
        throw DegenerateInput("fusion information matrix is singular or ill-conditioned");
    }
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

template <class Group>
std::size_t min_trace_member(const FusionInput<Group>& input) {
    std::size_t best = 0;
    double best_trace = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < input.members.size(); ++i) {
        const auto off = static_cast<Eigen::Index>(i) * Group::kDim;
        const double tr = input.joint_cov.block(off, off, Group::kDim, Group::kDim).trace();
        if (tr < best_trace) {
            best_trace = tr;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

/// Mahalanobis cost of `candidate` against all members under the joint covariance.
template <class Group>
double fusion_cost(const typename Group::Element& candidate, const FusionInput<Group>& input) {
    detail::check_input(input);
    const Eigen::MatrixXd g = detail::information_matrix(input.joint_cov);
    constexpr int m = Group::kDim;
    Eigen::VectorXd eps(input.joint_cov.rows());
    for (std::size_t i = 0; i < input.members.size(); ++i) {
        eps.segment<m>(static_cast<Eigen::Index>(i) * m) =
            Group::log(Group::compose(Group::inverse(input.members[i]), candidate));
    }
    return eps.dot(g * eps);
}

/// Closed-form fusion about a reference member:
///   zeta_i = log(X_i^-1 X_s), Ji = J_r^-1(zeta_i)
///   A = sum_ij Jj^T G_ij^T Ji + Ji^T G_ij Jj
///   b = sum_ij Jj^T G_ij^T zeta_i + Ji^T G_ij zeta_j
///   correction = -A^-1 b, mean = X_s exp(correction)
///   cov = J_r(correction) (c A^-1) J_r(correction)^T
template <class Group>
FusedEstimate<Group> fuse(const FusionInput<Group>& input, const FusionOptions& options = {}) {
    using Element = typename Group::Element;
    using Vector = typename Group::Vector;
    using Matrix = typename Group::Matrix;
    constexpr int m = Group::kDim;

    detail::check_input(input);
    const std::size_t n = input.members.size();
    const Eigen::MatrixXd g = detail::information_matrix(input.joint_cov);

    std::size_t ref = 0;
    switch (options.reference.kind) {
        case ReferenceKind::Fixed:
            if (options.reference.index >= n) throw ContractViolation("reference index out of range");
            ref = options.reference.index;
            break;
        case ReferenceKind::MinTrace:
        case ReferenceKind::Iterate:
            ref = detail::min_trace_member(input);
            break;
    }

    FusedEstimate<Group> out;
    out.reference_index = static_cast<int>(ref);
    Element reference = input.members[ref];
    const int max_iterations = options.reference.kind == ReferenceKind::Iterate ? options.reference.max_iterations : 1;

    std::vector<Vector> zeta(n);
    std::vector<Matrix> jinv(n);
    Matrix a_inv;
    for (int iter = 1;; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            zeta[i] = Group::log(Group::compose(Group::inverse(input.members[i]), reference));
            jinv[i] = Group::right_jacobian_inverse(zeta[i]);
        }
        Matrix a = Matrix::Zero();
        Vector b = Vector::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const Matrix gij = g.block<m, m>(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * m);
                a += jinv[j].transpose() * gij.transpose() * jinv[i] + jinv[i].transpose() * gij * jinv[j];
                b += jinv[j].transpose() * gij.transpose() * zeta[i] + jinv[i].transpose() * gij * zeta[j];
            }
        }
        a_inv = detail::checked_inverse<Matrix>(a);
        out.correction = -(a_inv * b);
        out.mean = Group::compose(reference, Group::exp(out.correction));
        out.iterations = iter;
        if (iter >= max_iterations || out.correction.norm() < options.reference.tolerance) {
            break;
        }
        reference = out.mean;
        out.reference_index = -1;
    }

    const Matrix jr = Group::right_jacobian(out.correction);
    out.cov = symmetrized(jr * (options.normalization * a_inv) * jr.transpose());
    return out;
}

template <class Group>
struct OracleResult {
    typename Group::Element mean;
    double cost = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Brute-force minimizer of fusion_cost for small n: damped Gauss-Newton on the
/// manifold with central-difference Jacobians of the whitened residual, started
/// from every member; the lowest-cost converged result wins. Stops when the
/// step is below 1e-10 or after 200 iterations. Uses only exp/log and the cost.
template <class Group>
OracleResult<Group> minimize_cost_oracle(const FusionInput<Group>& input) {
    using Element = typename Group::Element;
    using Vector = typename Group::Vector;
    constexpr int m = Group::kDim;

    detail::check_input(input);
    const std::size_t n = input.members.size();
    const Eigen::Index dim = static_cast<Eigen::Index>(n) * m;
    const Eigen::MatrixXd g = detail::information_matrix(input.joint_cov);
    // cost = |U eps|^2 with G = U^T U
    const Eigen::MatrixXd u = g.llt().matrixU();

    auto residual = [&](const Element& x) {
        Eigen::VectorXd eps(dim);
        for (std::size_t i = 0; i < n; ++i) {
            eps.segment<m>(static_cast<Eigen::Index>(i) * m) =
                Group::log(Group::compose(Group::inverse(input.members[i]), x));
        }
        return Eigen::VectorXd(u * eps);
    };

    OracleResult<Group> best;
    best.cost = std::numeric_limits<double>::infinity();
    constexpr double h = 1e-6;
    for (std::size_t start = 0; start < n; ++start) {
        Element x = input.members[start];
        Eigen::VectorXd r = residual(x);
        double cost = r.squaredNorm();
        bool converged = false;
        int iter = 0;
        for (; iter < 200 && !converged; ++iter) {
            Eigen::MatrixXd jac(dim, m);
            for (int k = 0; k < m; ++k) {
                Vector d = Vector::Zero();
                d(k) = h;
                jac.col(k) = (residual(Group::compose(x, Group::exp(d))) -
                              residual(Group::compose(x, Group::exp(-d)))) / (2.0 * h);
            }
            const Vector delta = -(jac.transpose() * jac).ldlt().solve(jac.transpose() * r);
            double scale = 1.0;
            Element trial = Group::compose(x, Group::exp(delta));
            Eigen::VectorXd trial_r = residual(trial);
            while (trial_r.squaredNorm() > cost && scale > 1e-6) {
                scale *= 0.5;
                trial = Group::compose(x, Group::exp(scale * delta));
                trial_r = residual(trial);
            }
            if (trial_r.squaredNorm() <= cost) {
                x = trial;
                r = trial_r;
                cost = r.squaredNorm();
            }
            converged = scale * delta.norm() < 1e-10;
        }
        if (converged && cost < best.cost) {
            best = {x, cost, true, iter};
        } else if (!best.converged && cost < best.cost) {
            best = {x, cost, false, iter};
        }
    }
    return best;
}

}  // namespace dualview

#include "dualview/aekf.hpp"

namespace dualview {

/// Two-track fusion of filter estimates with cross-covariance P_{first,second}.
FusedEstimate<StateGroup> fuse_tracks(const StateEstimate& first, const StateEstimate& second,
                                      const Matrix12& cross_first_second, const FusionOptions& options = {});

}  // namespace dualview
