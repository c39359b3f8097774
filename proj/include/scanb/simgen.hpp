#pragma once

#include "scanb/common.hpp"

#include <cstdint>
#include <functional>

namespace scanb {

enum class CaseId {
    case1_mean_shift,
    case2_partial_cov,
    case3_full_cov,
    case4_mixture,
    case5_laplace,
    null_only,
};

std::string to_string(CaseId id);
CaseId case_from_string(const std::string& name);

/// Dimension fixed by the case definition (10 for cases 1-4, 1 for case 5).
/// null_only has no fixed dimension and returns 0.
int case_dimension(CaseId id);

/// Pre-change samples drawn from which an online detector builds its
/// reference blocks and null-variance estimate.
struct ReferencePool {
    std::vector<Sample> samples;
    std::uint64_t rng_seed = 0;

    std::size_t size() const { return samples.size(); }
    Eigen::Index dimension() const { return samples.empty() ? 0 : samples.front().size(); }
};

struct StreamSpec {
    CaseId case_id = CaseId::case1_mean_shift;
    int dimension = 10;
    long tau = 0;       // pre-change samples emitted before the shift
    long length = 0;    // total samples
    std::uint64_t seed = 0;

    void validate() const;
};

/// One-at-a-time seeded generator: tau samples from P, then Q.
class StreamGen {
public:
    explicit StreamGen(StreamSpec spec);
    Sample next();
    long emitted() const { return emitted_; }

private:
    StreamSpec spec_;
    std::mt19937_64 rng_;
    long emitted_ = 0;
};

/// The whole stream as a vector; deterministic given spec (including seed).
std::vector<Sample> generate(const StreamSpec& spec);

/// Endless sampler of the case's pre-change distribution P, for null
/// (ARL) simulation.
std::function<Sample()> null_sample_source(CaseId case_id, int dimension, std::uint64_t seed);

/// `size` i.i.d. samples from the case's pre-change distribution P,
/// seeded independently of any test stream.
ReferencePool generate_reference_pool(CaseId case_id, int size, std::uint64_t seed,
                                      int dimension = 0);

}  // namespace scanb
