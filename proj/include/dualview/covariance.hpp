#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "dualview/errors.hpp"

namespace dualview {

/// Eigenvalue floor applied by repair_psd and after every filter step.
inline constexpr double kEigenFloor = 1e-12;

template <typename Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return 0.5 * (m + m.transpose());
}

/// Symmetrizes, then clamps eigenvalues below 1e-12 up to 1e-12 and reassembles.
/// Matrices already above the floor are returned without reassembly, so the
/// repair is idempotent on its own output up to reassembly roundoff.
template <typename Derived>
typename Derived::PlainObject repair_psd(const Eigen::MatrixBase<Derived>& m) {
    using Plain = typename Derived::PlainObject;
    Plain sym = symmetrized(m);
    const Eigen::Index n = sym.rows();
    Plain shifted = sym;
    shifted.diagonal().array() -= kEigenFloor;
    Eigen::LLT<Plain> llt(shifted);
    if (llt.info() == Eigen::Success) {
        return sym;
    }
    Eigen::SelfAdjointEigenSolver<Plain> es(sym);
    auto values = es.eigenvalues().eval();
    for (Eigen::Index i = 0; i < n; ++i) {
        values(i) = std::max(values(i), kEigenFloor);
    }
    Plain out = es.eigenvectors() * values.asDiagonal() * es.eigenvectors().transpose();
    return symmetrized(out);
}

/// Post-step covariance conditioning: rejects non-finite or clearly indefinite
/// matrices (min eigenvalue below -1e-6 relative to the largest), otherwise repair_psd.
template <typename Derived>
typename Derived::PlainObject condition_covariance(const Eigen::MatrixBase<Derived>& m, const char* where) {
    using Plain = typename Derived::PlainObject;
    if (!m.allFinite()) {
        throw NumericalFailure(std::string(where) + ": covariance has non-finite entries");
    }
    Plain sym = symmetrized(m);
    Plain shifted = sym;
    shifted.diagonal().array() -= kEigenFloor;
    if (Eigen::LLT<Plain>(shifted).info() == Eigen::Success) {
        return sym;
    }
    Eigen::SelfAdjointEigenSolver<Plain> es(sym);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (lo < -1e-6 * std::max(hi, 1.0)) {
        throw NumericalFailure(std::string(where) + ": covariance is not positive semidefinite (min eigenvalue " +
                               std::to_string(lo) + ")");
    }
    return repair_psd(sym);
}

}  // namespace dualview
