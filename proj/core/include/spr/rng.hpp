#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace spr {

// Counter-based deterministic random generator.
//
// Output word n is splitmix64(seed + (n+1) * GOLDEN): the state is a plain
// (seed, counter) pair, so streams are reproducible from the seed alone and
// independent of call-site history length. Gaussian variates use the
// Marsaglia polar method on top of the uniform stream; unit-sphere samples
// normalize a Gaussian vector. The same seed therefore yields the same
// vector stream on every run.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    // Next raw 64-bit word.
    std::uint64_t next_u64();

    // Uniform double in [0, 1), 53-bit resolution.
    double next_double();

    // Standard normal variate (polar rejection; the paired variate is
    // discarded to keep the state a pure counter).
    double next_gaussian();

    // Vector of independent standard normal entries.
    Eigen::VectorXd gaussian_vector(int dim);

    // Uniform sample on the unit sphere of R^dim.
    Eigen::VectorXd unit_vector(int dim);

    // Independent substream for restart/trial k, derived from the seed so
    // that trial schedules are reproducible and order-insensitive.
    RngState fork(std::uint64_t k) const;

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace spr
