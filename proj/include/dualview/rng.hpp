#pragma once

// Counter-based Philox4x64-10 generator. A stream is identified by (seed,
// stream id), which form the 128-bit key; the counter runs 0, 1, 2, ... so
// every stream is an independent, reproducible sequence.

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace dualview {

using Philox4x64Block = std::array<std::uint64_t, 4>;

/// One 10-round Philox4x64 block.
Philox4x64Block philox4x64_10(const Philox4x64Block& counter, const std::array<std::uint64_t, 2>& key);

/// Fixed stream assignment for every noise source of a scenario.
enum class StreamId : std::uint64_t {
    Truth = 1,
    HandMeasurement = 2,
    BaseMeasurement = 3,
    HandAvailability = 4,
    BaseAvailability = 5,
    HandInitial = 6,
    BaseInitial = 7,
};

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}
    RandomStream(std::uint64_t seed, StreamId stream) : RandomStream(seed, static_cast<std::uint64_t>(stream)) {}

    std::uint64_t nextU64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller; values are produced in pairs.
    double normal();

    /// Draw from N(0, cov) as L z with L the lower semidefinite Cholesky factor of cov.
    Eigen::VectorXd gaussian(const Eigen::MatrixXd& cov);

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_index_ = 0;
    Philox4x64Block buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Lower-triangular L with L L^T = m for symmetric PSD m. Pivots at or below
/// 1e-14 * max diagonal are treated as zero, so semidefinite inputs
/// (zero blocks, zero matrix) are accepted. Fixed row order, no pivoting.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& m);

}  // namespace dualview
