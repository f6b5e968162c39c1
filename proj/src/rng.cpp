#include "dualview/rng.hpp"

#include <cmath>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

Philox4x64Block philox4x64_10(const Philox4x64Block& counter, const std::array<std::uint64_t, 2>& key) {
    Philox4x64Block c = counter;
    std::uint64_t k0 = key[0];
    std::uint64_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }
    return c;
}

std::uint64_t RandomStream::nextU64() {
    if (buffered_ == 0) {
        buffer_ = philox4x64_10({block_index_, 0, 0, 0}, key_);
        ++block_index_;
        buffered_ = 4;
    }
    return buffer_[4 - buffered_--];
}

double RandomStream::uniform() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Eigen::VectorXd RandomStream::gaussian(const Eigen::MatrixXd& cov) {
    Eigen::VectorXd z(cov.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = normal();
    }
    return psd_cholesky(cov) * z;
}

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw ContractViolation("psd_cholesky needs a square matrix");
    }
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    const double scale = n > 0 ? m.diagonal().cwiseAbs().maxCoeff() : 0.0;
    const double floor = 1e-14 * scale;
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= floor) {
            if (d < -1e-8 * std::max(scale, 1.0)) {
                throw ContractViolation("psd_cholesky: matrix is not positive semidefinite");
            }
            continue;  // column stays zero
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

}  // namespace dualview
