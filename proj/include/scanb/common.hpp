#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace scanb {

// One stream observation: a d-dimensional real vector.
using Sample = Eigen::VectorXd;

// Bad caller-supplied data (dimension mismatch, invalid flag values).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (pool too small, bad plan).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Data that is formally valid but statistically unusable
// (zero median distance, singular covariance).
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (root bracketing, non-positive variance estimate).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a seed tuple (experiment, replication, role, ...) into one
// generator seed so that pool, stream, and replication streams never
// collide under parallel execution.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x8c5fb1c8747a1f4dULL;
    std::uint64_t out = 0;
    for (std::uint64_t p : parts) {
        state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
    return std::mt19937_64(mix_seed(parts));
}

}  // namespace scanb
