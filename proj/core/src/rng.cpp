#include "spr/rng.hpp"

#include <cmath>

#include "spr/errors.hpp"

namespace spr {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace

std::uint64_t RngState::next_u64() {
    ++counter_;
    return splitmix64(seed_ + counter_ * kGolden);
}

double RngState::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_gaussian() {
    // Marsaglia polar method; acceptance probability pi/4 per attempt.
    for (;;) {
        const double u = 2.0 * next_double() - 1.0;
        const double v = 2.0 * next_double() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

Eigen::VectorXd RngState::gaussian_vector(int dim) {
    if (dim <= 0) throw DomainError("gaussian_vector: dim must be positive");
    Eigen::VectorXd g(dim);
    for (int i = 0; i < dim; ++i) g[i] = next_gaussian();
    return g;
}

Eigen::VectorXd RngState::unit_vector(int dim) {
    for (;;) {
        Eigen::VectorXd g = gaussian_vector(dim);
        const double n = g.norm();
        if (n > 1e-150) return g / n;
    }
}

RngState RngState::fork(std::uint64_t k) const {
    return RngState(splitmix64(seed_ ^ splitmix64(k + 1)));
}

}  // namespace spr
