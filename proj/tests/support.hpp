#pragma once

#include <cmath>
#include <numbers>

#include "dualview/lie.hpp"
#include "dualview/rng.hpp"
#include "dualview/state.hpp"

namespace dualview::test {

inline Vector3 random_vec3(RandomStream& rng, double sigma) {
    return {sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
}

inline Twist6 random_twist(RandomStream& rng, double sigma) {
    Twist6 v;
    for (int i = 0; i < 6; ++i) v(i) = sigma * rng.normal();
    return v;
}

/// Rotation vector with a uniformly random direction and norm in (lo, hi).
inline Vector3 random_rotation_vector(RandomStream& rng, double lo, double hi) {
    Vector3 axis = random_vec3(rng, 1.0);
    while (axis.norm() < 1e-6) axis = random_vec3(rng, 1.0);
    return axis.normalized() * (lo + (hi - lo) * rng.uniform());
}

inline Pose random_pose(RandomStream& rng) {
    return {so3_exp(random_rotation_vector(rng, 0.0, 3.0)), random_vec3(rng, 1.0)};
}

inline Eigen::MatrixXd random_spd(RandomStream& rng, int n, double scale) {
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = rng.normal();
    return scale * (a * a.transpose() / n + 0.1 * Eigen::MatrixXd::Identity(n, n));
}

/// exp of a square matrix by scaling and squaring with a 20-term Taylor series.
template <class M>
M matrix_exp_series(const M& a) {
    const int squarings = 6;
    const M s = a / std::pow(2.0, squarings);
    M term = M::Identity(a.rows(), a.cols());
    M sum = term;
    for (int k = 1; k <= 20; ++k) {
        term = term * s / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

}  // namespace dualview::test
